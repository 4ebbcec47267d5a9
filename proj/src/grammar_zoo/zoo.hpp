#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "grammar_zoo/pattern.hpp"

namespace mlfw::zoo {

inline constexpr int kZooBins = 10;
// Grammars whose expansion (with every Plus taken once) exceeds this many
// tokens are rejected during zoo construction, keeping sampled strings short
// enough for recurrent training.
inline constexpr std::size_t kMaxBaseLength = 40;

struct Zoo {
  std::vector<PatternGrammar> grammars;
  std::uint64_t seed = 0;
  double mdl_lo = 0.0;
  double mdl_hi = 100.0;
};

struct ZooStats {
  std::size_t count = 0;
  double mean_mdl = 0.0, min_mdl = 0.0, max_mdl = 0.0;
  std::array<std::size_t, kZooBins> histogram{};
};

// Longest string derivable when every Plus node iterates once.
std::size_t base_length(const Node& n);

// Rejection-samples random rule trees into ten equal-width MDL bins over
// [mdl_lo, mdl_hi] until each bin holds its share of n (remainder goes to the
// lowest bins). Throws BinUnfillable if the attempt budget runs out.
Zoo build_zoo(int n, double mdl_lo, double mdl_hi, std::uint64_t seed,
              std::size_t attempts_per_grammar = 2000);

ZooStats zoo_stats(const Zoo& zoo);

// Persistence: {"seed": S, "mdl_lo": .., "mdl_hi": .., "grammars": [{"rules": sexpr, "mdl": bits}]}
void save_zoo(const Zoo& zoo, std::ostream& out);
Zoo load_zoo(std::istream& in);

// Probabilities proportional to exp(mdl / temperature); temperature != 0.
std::vector<double> softmax_weights(std::span<const double> mdl, double temperature);
double expected_mdl(std::span<const double> mdl, double temperature);

class GrammarSampler {
 public:
  GrammarSampler(const Zoo& zoo, double temperature);

  std::size_t sample_index(Rng& rng) const;
  const PatternGrammar& sample(Rng& rng) const { return zoo_->grammars[sample_index(rng)]; }
  std::span<const double> probabilities() const { return probabilities_; }

 private:
  const Zoo* zoo_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

}  // namespace mlfw::zoo
