#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "neural_core/arch.hpp"

namespace mlfw::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Named arrays in a fixed order:
//   embedding            [vocab x embed]
//   layer{l}.w_ih        [gates*hidden x in]   (in = embed for l = 0, else hidden)
//   layer{l}.w_hh        [gates*hidden x hidden]
//   LSTM: layer{l}.bias  [gates*hidden x 1]       gate order i, f, g, o
//   GRU:  layer{l}.b_ih, layer{l}.b_hh            gate order r, z, n
//   output.weight        [hidden x vocab]
//   output.bias          [vocab x 1]
// Gradients share the type.
template <typename T>
struct ParamSet {
  ArchDescriptor arch;
  std::vector<std::string> names;
  std::vector<Matrix<T>> arrays;

  std::size_t size() const { return arrays.size(); }
  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& a : arrays) n += static_cast<std::size_t>(a.size());
    return n;
  }

  // Indices into `arrays` for layer l.
  std::size_t layer_base(int l) const {
    const std::size_t per_layer = arch.cell == CellType::LSTM ? 3 : 4;
    return 1 + static_cast<std::size_t>(l) * per_layer;
  }
  std::size_t output_weight_index() const { return arrays.size() - 2; }
  std::size_t output_bias_index() const { return arrays.size() - 1; }
};

template <typename T>
ParamSet<T> zeros(const ArchDescriptor& arch) {
  arch.validate();
  const int h = arch.hidden_dim, g = arch.gate_count() * h;
  ParamSet<T> p;
  p.arch = arch;
  auto add = [&](std::string name, int rows, int cols) {
    p.names.push_back(std::move(name));
    p.arrays.push_back(Matrix<T>::Zero(rows, cols));
  };
  add("embedding", arch.vocab_size, arch.embed_dim);
  for (int l = 0; l < arch.layers; ++l) {
    const std::string prefix = "layer" + std::to_string(l) + ".";
    const int in = l == 0 ? arch.embed_dim : h;
    add(prefix + "w_ih", g, in);
    add(prefix + "w_hh", g, h);
    if (arch.cell == CellType::LSTM) {
      add(prefix + "bias", g, 1);
    } else {
      add(prefix + "b_ih", g, 1);
      add(prefix + "b_hh", g, 1);
    }
  }
  add("output.weight", h, arch.vocab_size);
  add("output.bias", arch.vocab_size, 1);
  return p;
}

template <typename T>
ParamSet<T> zeros_like(const ParamSet<T>& other) {
  return zeros<T>(other.arch);
}

// Every entry uniform in [-1/sqrt(hidden), +1/sqrt(hidden)].
template <typename T>
ParamSet<T> init_params(const ArchDescriptor& arch, Rng& rng) {
  ParamSet<T> p = zeros<T>(arch);
  const double bound = 1.0 / std::sqrt(static_cast<double>(arch.hidden_dim));
  for (auto& a : p.arrays) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        a(i, j) = static_cast<T>((2.0 * rng.uniform01() - 1.0) * bound);
      }
    }
  }
  return p;
}

template <typename T>
void check_congruent(const ParamSet<T>& a, const ParamSet<T>& b) {
  if (a.arrays.size() != b.arrays.size()) fail(ErrorCode::ShapeMismatch, "parameter sets differ in array count");
  for (std::size_t i = 0; i < a.arrays.size(); ++i) {
    if (a.arrays[i].rows() != b.arrays[i].rows() || a.arrays[i].cols() != b.arrays[i].cols()) {
      fail(ErrorCode::ShapeMismatch, "array '" + a.names[i] + "' has mismatched shape");
    }
  }
}

template <typename U, typename T>
ParamSet<U> cast(const ParamSet<T>& p) {
  ParamSet<U> out;
  out.arch = p.arch;
  out.names = p.names;
  for (const auto& a : p.arrays) out.arrays.push_back(a.template cast<U>());
  return out;
}

// dst += scale * src
template <typename T>
void axpy(ParamSet<T>& dst, T scale, const ParamSet<T>& src) {
  check_congruent(dst, src);
  for (std::size_t i = 0; i < dst.arrays.size(); ++i) dst.arrays[i] += scale * src.arrays[i];
}

template <typename T>
void scale(ParamSet<T>& p, T factor) {
  for (auto& a : p.arrays) a *= factor;
}

template <typename T>
double global_norm(const ParamSet<T>& p) {
  double sq = 0.0;
  for (const auto& a : p.arrays) sq += a.template cast<double>().squaredNorm();
  return std::sqrt(sq);
}

template <typename T>
bool all_finite(const ParamSet<T>& p) {
  for (const auto& a : p.arrays) {
    if (!a.allFinite()) return false;
  }
  return true;
}

}  // namespace mlfw::nn
