#include "neural_core/network.hpp"

#include <cmath>
#include <string>

#include "formal_langs/language.hpp"

namespace mlfw::nn {
namespace {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return S(1) / (S(1) + (-x).exp());
}

template <typename T>
void check_tokens(const ParamSet<T>& params, const TokenBatch& batch) {
  if (static_cast<std::size_t>(batch.batch) * batch.length != batch.tokens.size()) {
    fail(ErrorCode::ShapeMismatch, "token matrix size disagrees with its declared shape");
  }
  for (int tok : batch.tokens) {
    if (tok < 0 || tok >= params.arch.vocab_size) {
      fail(ErrorCode::ShapeMismatch, "token id " + std::to_string(tok) + " outside the vocabulary");
    }
  }
}

template <typename T>
void lstm_layer(const ParamSet<T>& p, int l, ForwardPass<T>& fp) {
  const auto base = p.layer_base(l);
  const auto& w_ih = p.arrays[base];
  const auto& w_hh = p.arrays[base + 1];
  const auto& bias = p.arrays[base + 2];
  const Eigen::Index h = p.arch.hidden_dim, B = fp.batch;
  const T forget = static_cast<T>(p.arch.forget_bias);

  Matrix<T> gates = w_ih * fp.inputs[l];
  gates.colwise() += bias.col(0);
  Matrix<T> cells(h, gates.cols()), cell_tanh(h, gates.cols()), out(h, gates.cols());
  Matrix<T> h_prev = Matrix<T>::Zero(h, B), c_prev = Matrix<T>::Zero(h, B);

  for (int t = 0; t < fp.steps; ++t) {
    auto g = gates.middleCols(static_cast<Eigen::Index>(t) * B, B);
    g.noalias() += w_hh * h_prev;
    g.topRows(h) = sigmoid(g.topRows(h).array()).matrix();
    g.middleRows(h, h) = sigmoid(g.middleRows(h, h).array() + forget).matrix();
    g.middleRows(2 * h, h) = g.middleRows(2 * h, h).array().tanh().matrix();
    g.bottomRows(h) = sigmoid(g.bottomRows(h).array()).matrix();

    auto c = cells.middleCols(static_cast<Eigen::Index>(t) * B, B);
    c = (g.middleRows(h, h).array() * c_prev.array() +
         g.topRows(h).array() * g.middleRows(2 * h, h).array()).matrix();
    auto tc = cell_tanh.middleCols(static_cast<Eigen::Index>(t) * B, B);
    tc = c.array().tanh().matrix();
    auto o = out.middleCols(static_cast<Eigen::Index>(t) * B, B);
    o = (g.bottomRows(h).array() * tc.array()).matrix();
    h_prev = o;
    c_prev = c;
  }
  fp.gates[l] = std::move(gates);
  fp.cells[l] = std::move(cells);
  fp.cell_tanh[l] = std::move(cell_tanh);
  fp.outputs[l] = std::move(out);
}

template <typename T>
void gru_layer(const ParamSet<T>& p, int l, ForwardPass<T>& fp) {
  const auto base = p.layer_base(l);
  const auto& w_ih = p.arrays[base];
  const auto& w_hh = p.arrays[base + 1];
  const auto& b_ih = p.arrays[base + 2];
  const auto& b_hh = p.arrays[base + 3];
  const Eigen::Index h = p.arch.hidden_dim, B = fp.batch;

  Matrix<T> gates = w_ih * fp.inputs[l];
  gates.colwise() += b_ih.col(0);
  Matrix<T> hidden_n(h, gates.cols()), out(h, gates.cols());
  Matrix<T> h_prev = Matrix<T>::Zero(h, B);
  Matrix<T> rec(3 * h, B);

  for (int t = 0; t < fp.steps; ++t) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(t) * B;
    rec.noalias() = w_hh * h_prev;
    rec.colwise() += b_hh.col(0);
    auto g = gates.middleCols(c0, B);
    g.topRows(2 * h) = sigmoid((g.topRows(2 * h) + rec.topRows(2 * h)).array()).matrix();
    auto hn = hidden_n.middleCols(c0, B);
    hn = rec.bottomRows(h);
    g.bottomRows(h) =
        (g.bottomRows(h).array() + g.topRows(h).array() * hn.array()).tanh().matrix();
    auto o = out.middleCols(c0, B);
    const auto z = g.middleRows(h, h).array();
    o = ((T(1) - z) * g.bottomRows(h).array() + z * h_prev.array()).matrix();
    h_prev = o;
  }
  fp.gates[l] = std::move(gates);
  fp.hidden_n[l] = std::move(hidden_n);
  fp.outputs[l] = std::move(out);
}

template <typename T>
void lstm_layer_backward(const ParamSet<T>& p, int l, const ForwardPass<T>& fp, const Matrix<T>& d_out,
                         ParamSet<T>& grads, Matrix<T>& d_input) {
  const auto base = p.layer_base(l);
  const auto& w_ih = p.arrays[base];
  const auto& w_hh = p.arrays[base + 1];
  const Eigen::Index h = p.arch.hidden_dim, B = fp.batch;
  const auto& gates = fp.gates[l];
  const auto& cells = fp.cells[l];
  const auto& cell_tanh = fp.cell_tanh[l];

  Matrix<T> d_gates(gates.rows(), gates.cols());
  Matrix<T> dh_rec = Matrix<T>::Zero(h, B), dc_rec = Matrix<T>::Zero(h, B);
  Matrix<T> dh(h, B), dc(h, B);
  for (int t = fp.steps - 1; t >= 0; --t) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(t) * B;
    const auto g = gates.middleCols(c0, B);
    const auto i = g.topRows(h).array();
    const auto f = g.middleRows(h, h).array();
    const auto cand = g.middleRows(2 * h, h).array();
    const auto o = g.bottomRows(h).array();
    const auto tc = cell_tanh.middleCols(c0, B).array();

    dh = d_out.middleCols(c0, B) + dh_rec;
    dc = (dc_rec.array() + dh.array() * o * (T(1) - tc * tc)).matrix();
    auto dg = d_gates.middleCols(c0, B);
    dg.topRows(h) = (dc.array() * cand * i * (T(1) - i)).matrix();
    if (t > 0) {
      dg.middleRows(h, h) = (dc.array() * cells.middleCols(c0 - B, B).array() * f * (T(1) - f)).matrix();
    } else {
      dg.middleRows(h, h).setZero();
    }
    dg.middleRows(2 * h, h) = (dc.array() * i * (T(1) - cand * cand)).matrix();
    dg.bottomRows(h) = (dh.array() * tc * o * (T(1) - o)).matrix();

    dc_rec = (dc.array() * f).matrix();
    dh_rec.noalias() = w_hh.transpose() * dg;
  }

  const Eigen::Index cols = gates.cols();
  grads.arrays[base].noalias() += d_gates * fp.inputs[l].transpose();
  if (fp.steps > 1) {
    grads.arrays[base + 1].noalias() +=
        d_gates.rightCols(cols - B) * fp.outputs[l].leftCols(cols - B).transpose();
  }
  grads.arrays[base + 2] += d_gates.rowwise().sum();
  d_input.noalias() = w_ih.transpose() * d_gates;
}

template <typename T>
void gru_layer_backward(const ParamSet<T>& p, int l, const ForwardPass<T>& fp, const Matrix<T>& d_out,
                        ParamSet<T>& grads, Matrix<T>& d_input) {
  const auto base = p.layer_base(l);
  const auto& w_ih = p.arrays[base];
  const auto& w_hh = p.arrays[base + 1];
  const Eigen::Index h = p.arch.hidden_dim, B = fp.batch;
  const auto& gates = fp.gates[l];
  const auto& outputs = fp.outputs[l];

  Matrix<T> d_in_gates(gates.rows(), gates.cols());
  Matrix<T> d_rec_gates(gates.rows(), gates.cols());
  Matrix<T> dh_rec = Matrix<T>::Zero(h, B);
  Matrix<T> dh(h, B), h_prev(h, B);
  for (int t = fp.steps - 1; t >= 0; --t) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(t) * B;
    const auto g = gates.middleCols(c0, B);
    const auto r = g.topRows(h).array();
    const auto z = g.middleRows(h, h).array();
    const auto n = g.bottomRows(h).array();
    const auto hn = fp.hidden_n[l].middleCols(c0, B).array();
    if (t > 0) {
      h_prev = outputs.middleCols(c0 - B, B);
    } else {
      h_prev.setZero();
    }

    dh = d_out.middleCols(c0, B) + dh_rec;
    const auto dan = (dh.array() * (T(1) - z) * (T(1) - n * n)).eval();
    auto dgi = d_in_gates.middleCols(c0, B);
    auto dgr = d_rec_gates.middleCols(c0, B);
    dgi.topRows(h) = (dan * hn * r * (T(1) - r)).matrix();
    dgi.middleRows(h, h) = (dh.array() * (h_prev.array() - n) * z * (T(1) - z)).matrix();
    dgi.bottomRows(h) = dan.matrix();
    dgr.topRows(2 * h) = dgi.topRows(2 * h);
    dgr.bottomRows(h) = (dan * r).matrix();

    dh_rec = (dh.array() * z).matrix();
    dh_rec.noalias() += w_hh.transpose() * dgr;
  }

  const Eigen::Index cols = gates.cols();
  grads.arrays[base].noalias() += d_in_gates * fp.inputs[l].transpose();
  if (fp.steps > 1) {
    grads.arrays[base + 1].noalias() +=
        d_rec_gates.rightCols(cols - B) * outputs.leftCols(cols - B).transpose();
  }
  grads.arrays[base + 2] += d_in_gates.rowwise().sum();
  grads.arrays[base + 3] += d_rec_gates.rowwise().sum();
  d_input.noalias() = w_ih.transpose() * d_in_gates;
}

}  // namespace

template <typename T>
ForwardPass<T> forward(const ParamSet<T>& params, const TokenBatch& batch, int steps) {
  check_tokens(params, batch);
  const auto& arch = params.arch;
  ForwardPass<T> fp;
  fp.batch = batch.batch;
  fp.steps = (steps < 0 || steps > batch.length) ? batch.length : steps;
  const Eigen::Index cols = static_cast<Eigen::Index>(fp.steps) * fp.batch;
  const auto layers = static_cast<std::size_t>(arch.layers);
  fp.inputs.resize(layers);
  fp.gates.resize(layers);
  fp.outputs.resize(layers);
  if (arch.cell == CellType::LSTM) {
    fp.cells.resize(layers);
    fp.cell_tanh.resize(layers);
  } else {
    fp.hidden_n.resize(layers);
  }

  const auto& embedding = params.arrays[0];
  fp.inputs[0].resize(arch.embed_dim, cols);
  for (int t = 0; t < fp.steps; ++t) {
    for (int b = 0; b < fp.batch; ++b) {
      fp.inputs[0].col(fp.column(b, t)) = embedding.row(batch.at(b, t)).transpose();
    }
  }
  for (int l = 0; l < arch.layers; ++l) {
    if (l > 0) fp.inputs[l] = fp.outputs[l - 1];
    if (arch.cell == CellType::LSTM) {
      lstm_layer(params, l, fp);
    } else {
      gru_layer(params, l, fp);
    }
  }

  const auto& w_out = params.arrays[params.output_weight_index()];
  const auto& b_out = params.arrays[params.output_bias_index()];
  fp.logits.noalias() = w_out.transpose() * fp.outputs.back();
  fp.logits.colwise() += b_out.col(0);
  fp.probs.resize(fp.logits.rows(), fp.logits.cols());
  for (Eigen::Index c = 0; c < fp.logits.cols(); ++c) {
    const T top = fp.logits.col(c).maxCoeff();
    auto e = (fp.logits.col(c).array() - top).exp();
    fp.probs.col(c) = (e / e.sum()).matrix();
  }
  return fp;
}

template <typename T>
double loss(const ParamSet<T>& params, const TokenBatch& batch) {
  const auto fp = forward(params, batch, batch.length - 1);
  double total = 0.0;
  int count = 0;
  for (int t = 0; t + 1 < batch.length; ++t) {
    for (int b = 0; b < batch.batch; ++b) {
      const int target = batch.at(b, t + 1);
      if (target == langs::kPad) continue;
      total -= std::log(static_cast<double>(fp.probs(target, fp.column(b, t))));
      ++count;
    }
  }
  return count > 0 ? total / count : 0.0;
}

template <typename T>
LossGrad<T> loss_and_gradient(const ParamSet<T>& params, const TokenBatch& batch) {
  const auto fp = forward(params, batch, batch.length - 1);
  LossGrad<T> out;
  out.grads = zeros_like(params);
  const auto& arch = params.arch;

  int count = 0;
  for (int t = 0; t + 1 < batch.length; ++t) {
    for (int b = 0; b < batch.batch; ++b) count += batch.at(b, t + 1) != langs::kPad;
  }
  out.targets = count;
  if (count == 0) return out;

  // Softmax cross-entropy gradient at every unmasked position.
  Matrix<T> d_logits = Matrix<T>::Zero(fp.probs.rows(), fp.probs.cols());
  const T inv = T(1) / static_cast<T>(count);
  double total = 0.0;
  for (int t = 0; t < fp.steps; ++t) {
    for (int b = 0; b < batch.batch; ++b) {
      const int target = batch.at(b, t + 1);
      if (target == langs::kPad) continue;
      const auto c = fp.column(b, t);
      total -= std::log(static_cast<double>(fp.probs(target, c)));
      d_logits.col(c) = fp.probs.col(c) * inv;
      d_logits(target, c) -= inv;
    }
  }
  out.loss = total / count;

  const auto& w_out = params.arrays[params.output_weight_index()];
  out.grads.arrays[params.output_weight_index()].noalias() = fp.outputs.back() * d_logits.transpose();
  out.grads.arrays[params.output_bias_index()] = d_logits.rowwise().sum();
  Matrix<T> d_hidden = w_out * d_logits;
  Matrix<T> d_input;
  for (int l = arch.layers - 1; l >= 0; --l) {
    if (arch.cell == CellType::LSTM) {
      lstm_layer_backward(params, l, fp, d_hidden, out.grads, d_input);
    } else {
      gru_layer_backward(params, l, fp, d_hidden, out.grads, d_input);
    }
    d_hidden = std::move(d_input);
    d_input = Matrix<T>();
  }

  auto& d_embedding = out.grads.arrays[0];
  for (int t = 0; t < fp.steps; ++t) {
    for (int b = 0; b < batch.batch; ++b) {
      d_embedding.row(batch.at(b, t)) += d_hidden.col(fp.column(b, t)).transpose();
    }
  }
  return out;
}

template ForwardPass<float> forward(const ParamSet<float>&, const TokenBatch&, int);
template ForwardPass<double> forward(const ParamSet<double>&, const TokenBatch&, int);
template double loss(const ParamSet<float>&, const TokenBatch&);
template double loss(const ParamSet<double>&, const TokenBatch&);
template LossGrad<float> loss_and_gradient(const ParamSet<float>&, const TokenBatch&);
template LossGrad<double> loss_and_gradient(const ParamSet<double>&, const TokenBatch&);

}  // namespace mlfw::nn
