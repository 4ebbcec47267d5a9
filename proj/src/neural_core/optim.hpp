#pragma once

#include <cmath>

#include "neural_core/params.hpp"

namespace mlfw::nn {

// p <- p - lr * g
template <typename T>
void sgd_step(ParamSet<T>& params, const ParamSet<T>& grads, double lr) {
  axpy(params, static_cast<T>(-lr), grads);
}

template <typename T>
struct AdamState {
  ParamSet<T> m;
  ParamSet<T> v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros_for(const ParamSet<T>& params) {
    AdamState s;
    s.m = zeros_like(params);
    s.v = zeros_like(params);
    return s;
  }
};

// Bias-corrected Adam update; increments state.step.
template <typename T>
void adam_step(AdamState<T>& state, ParamSet<T>& params, const ParamSet<T>& grads, double lr) {
  check_congruent(state.m, params);
  check_congruent(params, grads);
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
  const T step_size = static_cast<T>(lr / c1);
  const T root_c2 = static_cast<T>(std::sqrt(c2));
  const T eps = static_cast<T>(state.eps);
  for (std::size_t i = 0; i < params.arrays.size(); ++i) {
    auto& m = state.m.arrays[i];
    auto& v = state.v.arrays[i];
    const auto& g = grads.arrays[i];
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.cwiseProduct(g);
    params.arrays[i].array() -= step_size * m.array() / (v.array().sqrt() / root_c2 + eps);
  }
}

struct ClipResult {
  double norm = 0.0;
  bool clipped = false;
};

// Rescales grads in place so their global L2 norm is at most max_norm.
// max_norm <= 0 disables clipping.
template <typename T>
ClipResult clip_global_norm(ParamSet<T>& grads, double max_norm) {
  ClipResult r;
  r.norm = global_norm(grads);
  if (max_norm > 0.0 && r.norm > max_norm) {
    scale(grads, static_cast<T>(max_norm / r.norm));
    r.clipped = true;
  }
  return r;
}

}  // namespace mlfw::nn
