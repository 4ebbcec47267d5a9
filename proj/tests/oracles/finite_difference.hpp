#pragma once

// Central-difference gradient oracle, evaluated in double precision through
// the loss alone (never through the backward pass).

#include <algorithm>
#include <cmath>
#include <vector>

#include "common/rng.hpp"
#include "neural_core/network.hpp"

namespace mlfw::testing {

struct GradientCheck {
  double max_relative_error = 0.0;
  int coordinates = 0;
};

// Relative error |a - b| / max(|a|, |b|, floor); the floor keeps coordinates
// whose true gradient is ~0 from dividing noise by noise.
inline double relative_error(double a, double b, double floor = 1e-7) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline GradientCheck check_gradients(const nn::ParamSet<double>& params, const nn::TokenBatch& batch,
                                     int coordinates, Rng& rng, double h = 1e-4) {
  const auto analytic = nn::loss_and_gradient(params, batch);
  GradientCheck out;
  auto probe = params;
  for (int k = 0; k < coordinates; ++k) {
    const auto a = static_cast<std::size_t>(rng.below(params.arrays.size()));
    auto& arr = probe.arrays[a];
    const auto idx = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(arr.size())));
    const double saved = arr.data()[idx];
    arr.data()[idx] = saved + h;
    const double up = nn::loss(probe, batch);
    arr.data()[idx] = saved - h;
    const double down = nn::loss(probe, batch);
    arr.data()[idx] = saved;
    const double numeric = (up - down) / (2 * h);
    const double exact = analytic.grads.arrays[a].data()[idx];
    out.max_relative_error = std::max(out.max_relative_error, relative_error(exact, numeric));
    ++out.coordinates;
  }
  return out;
}

}  // namespace mlfw::testing
