#include "grammar_zoo/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "common/error.hpp"
#include "json.hpp"

namespace mlfw::zoo {

std::size_t base_length(const Node& n) {
  switch (n.kind) {
    case NodeKind::Literal: return 1;
    case NodeKind::Concat: return base_length(n.children[0]) + base_length(n.children[1]);
    case NodeKind::Union: return std::max(base_length(n.children[0]), base_length(n.children[1]));
    case NodeKind::Repeat: return static_cast<std::size_t>(n.hi) * base_length(n.children[0]);
    case NodeKind::Plus: return base_length(n.children[0]);
  }
  return 0;
}

Zoo build_zoo(int n, double mdl_lo, double mdl_hi, std::uint64_t seed,
              std::size_t attempts_per_grammar) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "zoo size must be >= 1");
  if (!(mdl_hi > mdl_lo)) fail(ErrorCode::InvalidArgument, "zoo needs mdl_lo < mdl_hi");

  std::array<int, kZooBins> quota{};
  for (int b = 0; b < kZooBins; ++b) quota[b] = n / kZooBins + (b < n % kZooBins ? 1 : 0);
  std::array<std::vector<PatternGrammar>, kZooBins> bins;

  const double width = (mdl_hi - mdl_lo) / kZooBins;
  // Enough nodes to reach the top of the range with single-symbol literals.
  const int max_nodes = std::max(2, static_cast<int>(std::ceil(mdl_hi / std::log2(5.0))) + 2);

  Rng rng(seed);
  int remaining = n;
  const std::size_t budget = attempts_per_grammar * static_cast<std::size_t>(n);
  for (std::size_t attempt = 0; attempt < budget && remaining > 0; ++attempt) {
    const int alphabet = static_cast<int>(rng.between(1, kMaxAlphabet));
    const int nodes = static_cast<int>(rng.between(1, max_nodes));
    Node tree = random_tree(nodes, alphabet, rng);
    if (base_length(tree) > kMaxBaseLength) continue;
    const double bits = mdl_score(tree, alphabet);
    if (bits < mdl_lo || bits > mdl_hi) continue;
    const int bin = std::min(kZooBins - 1, static_cast<int>((bits - mdl_lo) / width));
    if (static_cast<int>(bins[bin].size()) >= quota[bin]) continue;
    bins[bin].emplace_back(std::move(tree), alphabet);
    --remaining;
  }
  for (int b = 0; b < kZooBins; ++b) {
    if (static_cast<int>(bins[b].size()) < quota[b]) {
      fail(ErrorCode::BinUnfillable,
           "MDL bin [" + std::to_string(mdl_lo + b * width) + ", " +
               std::to_string(mdl_lo + (b + 1) * width) + ") holds " +
               std::to_string(bins[b].size()) + " of " + std::to_string(quota[b]) +
               " grammars after the attempt budget");
    }
  }

  Zoo zoo;
  zoo.seed = seed;
  zoo.mdl_lo = mdl_lo;
  zoo.mdl_hi = mdl_hi;
  zoo.grammars.reserve(static_cast<std::size_t>(n));
  for (auto& bin : bins) {
    for (auto& g : bin) zoo.grammars.push_back(std::move(g));
  }
  return zoo;
}

ZooStats zoo_stats(const Zoo& zoo) {
  ZooStats stats;
  stats.count = zoo.grammars.size();
  if (stats.count == 0) return stats;
  stats.min_mdl = std::numeric_limits<double>::infinity();
  stats.max_mdl = -stats.min_mdl;
  const double width = (zoo.mdl_hi - zoo.mdl_lo) / kZooBins;
  double sum = 0.0;
  for (const auto& g : zoo.grammars) {
    const double bits = g.mdl_bits();
    sum += bits;
    stats.min_mdl = std::min(stats.min_mdl, bits);
    stats.max_mdl = std::max(stats.max_mdl, bits);
    const int bin = std::clamp(static_cast<int>((bits - zoo.mdl_lo) / width), 0, kZooBins - 1);
    ++stats.histogram[static_cast<std::size_t>(bin)];
  }
  stats.mean_mdl = sum / static_cast<double>(stats.count);
  return stats;
}

void save_zoo(const Zoo& zoo, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["seed"] = zoo.seed;
  doc["mdl_lo"] = zoo.mdl_lo;
  doc["mdl_hi"] = zoo.mdl_hi;
  auto& list = doc["grammars"] = nlohmann::ordered_json::array();
  for (const auto& g : zoo.grammars) {
    nlohmann::ordered_json entry;
    entry["rules"] = g.to_sexpr();
    entry["mdl"] = g.mdl_bits();
    list.push_back(std::move(entry));
  }
  out << doc.dump(1) << '\n';
}

Zoo load_zoo(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("zoo file is not valid JSON: ") + e.what());
  }
  try {
    Zoo zoo;
    zoo.seed = doc.at("seed").get<std::uint64_t>();
    zoo.mdl_lo = doc.value("mdl_lo", 0.0);
    zoo.mdl_hi = doc.value("mdl_hi", 100.0);
    for (const auto& entry : doc.at("grammars")) {
      auto g = PatternGrammar::parse(entry.at("rules").get<std::string>());
      const double stored = entry.at("mdl").get<double>();
      if (std::abs(stored - g.mdl_bits()) > 1e-9) {
        fail(ErrorCode::Format, "stored mdl " + std::to_string(stored) + " disagrees with rules " +
                                    g.to_sexpr());
      }
      zoo.grammars.push_back(std::move(g));
    }
    return zoo;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("zoo file has the wrong shape: ") + e.what());
  }
}

std::vector<double> softmax_weights(std::span<const double> mdl, double temperature) {
  if (temperature == 0.0 || !std::isfinite(temperature)) {
    fail(ErrorCode::InvalidArgument, "sampling temperature must be finite and nonzero");
  }
  if (mdl.empty()) fail(ErrorCode::InvalidArgument, "softmax over an empty zoo");
  double top = -std::numeric_limits<double>::infinity();
  for (double m : mdl) top = std::max(top, m / temperature);
  std::vector<double> w(mdl.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mdl.size(); ++i) {
    w[i] = std::exp(mdl[i] / temperature - top);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

double expected_mdl(std::span<const double> mdl, double temperature) {
  const auto w = softmax_weights(mdl, temperature);
  double e = 0.0;
  for (std::size_t i = 0; i < mdl.size(); ++i) e += w[i] * mdl[i];
  return e;
}

GrammarSampler::GrammarSampler(const Zoo& zoo, double temperature) : zoo_(&zoo) {
  std::vector<double> mdl;
  mdl.reserve(zoo.grammars.size());
  for (const auto& g : zoo.grammars) mdl.push_back(g.mdl_bits());
  probabilities_ = softmax_weights(mdl, temperature);
  cumulative_.resize(probabilities_.size());
  double run = 0.0;
  for (std::size_t i = 0; i < probabilities_.size(); ++i) {
    run += probabilities_[i];
    cumulative_[i] = run;
  }
}

std::size_t GrammarSampler::sample_index(Rng& rng) const {
  const double u = rng.uniform01() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace mlfw::zoo
