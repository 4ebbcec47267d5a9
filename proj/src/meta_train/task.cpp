#include "meta_train/task.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "common/error.hpp"
#include "formal_langs/sampling.hpp"

namespace mlfw::meta {

VocabMap VocabMap::identity() {
  VocabMap m;
  std::iota(m.forward_.begin(), m.forward_.end(), 0);
  m.inverse_ = m.forward_;
  return m;
}

VocabMap VocabMap::random(Rng& rng) {
  VocabMap m = identity();
  rng.shuffle(std::span(m.forward_).subspan(langs::kFirstPayload));
  for (int s = 0; s < langs::kVocabSize; ++s) m.inverse_[static_cast<std::size_t>(m.forward_[s])] = s;
  return m;
}

SymbolString VocabMap::apply(std::span<const Symbol> s) const {
  SymbolString out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [&](Symbol x) { return forward_.at(static_cast<std::size_t>(x)); });
  return out;
}

SymbolString VocabMap::invert(std::span<const Symbol> s) const {
  SymbolString out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [&](Symbol x) { return inverse_.at(static_cast<std::size_t>(x)); });
  return out;
}

TaskSource TaskSource::language(const langs::LanguageSpec& spec) {
  TaskSource s;
  s.spec_ = spec;
  return s;
}

TaskSource TaskSource::grammar_zoo(std::shared_ptr<const zoo::Zoo> zoo, double temperature) {
  if (!zoo || zoo->grammars.empty()) fail(ErrorCode::InvalidArgument, "zoo source needs a nonempty zoo");
  TaskSource s;
  s.sampler_ = std::make_shared<const zoo::GrammarSampler>(*zoo, temperature);
  s.zoo_ = std::move(zoo);
  s.temperature_ = temperature;
  return s;
}

std::string TaskSource::describe() const {
  if (!is_zoo()) return std::string(spec_->name_str());
  std::ostringstream os;
  os << "zoo(T=" << temperature_ << ")";
  return os.str();
}

TaskInstance make_task(const TaskSource& source, Rng& rng, const TaskShape& shape) {
  if (shape.support < 0 || shape.query < 0) fail(ErrorCode::InvalidArgument, "negative task size");
  TaskInstance task;
  task.vocab = VocabMap::random(rng);
  if (!source.is_zoo()) {
    for (auto& s : langs::sample_by_length_range(source.spec(), shape.support_lo, shape.support_hi,
                                                 shape.support, rng))
      task.support.push_back(task.vocab.apply(s.symbols));
    for (auto& s : langs::sample_by_length_range(source.spec(), shape.query_lo, shape.query_hi,
                                                 shape.query, rng))
      task.query.push_back(task.vocab.apply(s.symbols));
    return task;
  }
  task.grammar = source.sampler().sample_index(rng);
  const auto& grammar = source.zoo().grammars[*task.grammar];
  std::vector<SymbolString> drawn;
  for (int i = 0; i < shape.support + shape.query; ++i) drawn.push_back(zoo::sample_string(grammar, rng));
  std::stable_sort(drawn.begin(), drawn.end(),
                   [](const SymbolString& a, const SymbolString& b) { return a.size() < b.size(); });
  // Support keeps the sampled order rather than the sorted one.
  std::vector<SymbolString> support(drawn.begin(), drawn.begin() + shape.support);
  rng.shuffle(std::span(support));
  for (auto& s : support) task.support.push_back(task.vocab.apply(s));
  for (auto it = drawn.begin() + shape.support; it != drawn.end(); ++it) task.query.push_back(task.vocab.apply(*it));
  return task;
}

}  // namespace mlfw::meta
