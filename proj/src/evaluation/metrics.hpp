#pragma once

#include <span>

#include "formal_langs/language.hpp"

namespace mlfw::eval {

inline constexpr double kNormTolerance = 1e-6;

// Throws BadDistribution unless dist has kVocabSize finite nonnegative
// entries summing to 1 within kNormTolerance.
void check_distribution(std::span<const double> dist);

// Probability mass on valid tokens.
double p_val(std::span<const double> dist, const langs::ContinuationSet& valid);

// Fraction of valid tokens whose probability strictly exceeds the total mass
// of the invalid tokens.
double better_than(std::span<const double> dist, const langs::ContinuationSet& valid);

// Harmonic mean; 0 when p + b = 0.
double f1(double p, double b);

struct MetricTriple {
  double p_val = 0.0, bt = 0.0, f1 = 0.0;
};

MetricTriple score(std::span<const double> dist, const langs::ContinuationSet& valid);

}  // namespace mlfw::eval
