#include "evaluation/metrics.hpp"

#include <cmath>

#include "common/error.hpp"

namespace mlfw::eval {

void check_distribution(std::span<const double> dist) {
  if (dist.size() != static_cast<std::size_t>(langs::kVocabSize))
    fail(ErrorCode::BadDistribution, "distribution must cover the 10-token vocabulary");
  double sum = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < 0.0) fail(ErrorCode::BadDistribution, "distribution has a negative or non-finite entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) fail(ErrorCode::BadDistribution, "distribution does not sum to 1");
}

double p_val(std::span<const double> dist, const langs::ContinuationSet& valid) {
  check_distribution(dist);
  double mass = 0.0;
  for (int x = 0; x < langs::kVocabSize; ++x)
    if (valid.contains(x)) mass += dist[static_cast<std::size_t>(x)];
  return mass;
}

double better_than(std::span<const double> dist, const langs::ContinuationSet& valid) {
  check_distribution(dist);
  if (valid.empty()) fail(ErrorCode::InvalidArgument, "better_than needs a nonempty valid set");
  double invalid = 0.0;
  for (int x = 0; x < langs::kVocabSize; ++x)
    if (!valid.contains(x)) invalid += dist[static_cast<std::size_t>(x)];
  int above = 0;
  for (int x = 0; x < langs::kVocabSize; ++x)
    if (valid.contains(x) && dist[static_cast<std::size_t>(x)] > invalid) ++above;
  return static_cast<double>(above) / static_cast<double>(valid.size());
}

double f1(double p, double b) {
  if (!(p >= 0.0 && p <= 1.0 && b >= 0.0 && b <= 1.0)) fail(ErrorCode::InvalidArgument, "f1 inputs must lie in [0, 1]");
  return p + b == 0.0 ? 0.0 : 2.0 * p * b / (p + b);
}

MetricTriple score(std::span<const double> dist, const langs::ContinuationSet& valid) {
  MetricTriple m;
  m.p_val = p_val(dist, valid);
  m.bt = better_than(dist, valid);
  m.f1 = f1(m.p_val, m.bt);
  return m;
}

}  // namespace mlfw::eval
