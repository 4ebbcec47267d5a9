#pragma once

#include <vector>

#include "neural_core/batch.hpp"
#include "neural_core/params.hpp"

namespace mlfw::nn {

// Activations of one forward pass. Columns are time-major: step t of batch
// row b lives in column t * batch + b.
template <typename T>
struct ForwardPass {
  int batch = 0;
  int steps = 0;
  std::vector<Matrix<T>> inputs;     // per layer, [in x steps*batch]
  std::vector<Matrix<T>> gates;      // per layer, activated gates
  std::vector<Matrix<T>> cells;      // LSTM cell state
  std::vector<Matrix<T>> cell_tanh;  // LSTM tanh(cell)
  std::vector<Matrix<T>> hidden_n;   // GRU W_hn h_prev + b_hn
  std::vector<Matrix<T>> outputs;    // per layer hidden state
  Matrix<T> logits;                  // [vocab x steps*batch]
  Matrix<T> probs;

  Eigen::Index column(int b, int t) const { return static_cast<Eigen::Index>(t) * batch + b; }
};

// Runs the first `steps` columns of the batch (all columns when steps < 0).
// probs.col(column(b, t)) is the next-token distribution after reading
// tokens[b][0..t]. Throws ShapeMismatch for out-of-vocabulary tokens.
template <typename T>
ForwardPass<T> forward(const ParamSet<T>& params, const TokenBatch& batch, int steps = -1);

template <typename T>
struct LossGrad {
  double loss = 0.0;
  int targets = 0;
  ParamSet<T> grads;
};

// Mean next-token cross-entropy over non-PAD targets.
template <typename T>
double loss(const ParamSet<T>& params, const TokenBatch& batch);

// Loss together with its exact gradient (backpropagation through time).
template <typename T>
LossGrad<T> loss_and_gradient(const ParamSet<T>& params, const TokenBatch& batch);

}  // namespace mlfw::nn
