#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "formal_langs/language.hpp"
#include "grammar_zoo/zoo.hpp"

namespace mlfw::meta {

using langs::Symbol;
using langs::SymbolString;

// Permutation of the vocabulary that fixes START, STOP and PAD.
class VocabMap {
 public:
  static VocabMap identity();
  static VocabMap random(Rng& rng);

  Symbol apply(Symbol s) const { return forward_[static_cast<std::size_t>(s)]; }
  SymbolString apply(std::span<const Symbol> s) const;
  SymbolString invert(std::span<const Symbol> s) const;
  std::span<const Symbol> table() const { return forward_; }

  bool operator==(const VocabMap&) const = default;

 private:
  std::array<Symbol, langs::kVocabSize> forward_{};
  std::array<Symbol, langs::kVocabSize> inverse_{};
};

// A single formal language, or the grammar zoo under a sampling temperature.
class TaskSource {
 public:
  static TaskSource language(const langs::LanguageSpec& spec);
  static TaskSource grammar_zoo(std::shared_ptr<const zoo::Zoo> zoo, double temperature);

  bool is_zoo() const { return sampler_ != nullptr; }
  const langs::LanguageSpec& spec() const { return *spec_; }
  const zoo::Zoo& zoo() const { return *zoo_; }
  const zoo::GrammarSampler& sampler() const { return *sampler_; }
  double temperature() const { return temperature_; }
  // "anbncn" or "zoo(T=-5)".
  std::string describe() const;

 private:
  std::optional<langs::LanguageSpec> spec_;
  std::shared_ptr<const zoo::Zoo> zoo_;
  std::shared_ptr<const zoo::GrammarSampler> sampler_;
  double temperature_ = 0.0;
};

struct TaskShape {
  int support = 200;
  int query = 20;
  int support_lo = 1, support_hi = 10;
  int query_lo = 11, query_hi = 20;
};

// Strings are stored already mapped through vocab.
struct TaskInstance {
  std::optional<std::size_t> grammar;  // zoo index for zoo sources
  VocabMap vocab;
  std::vector<SymbolString> support;
  std::vector<SymbolString> query;
};

// Language sources sample support and query by language length. Zoo sources
// draw a grammar, sample support + query strings from it, and give the
// `query` longest (by token count) to the query set.
TaskInstance make_task(const TaskSource& source, Rng& rng, const TaskShape& shape = {});

}  // namespace mlfw::meta
