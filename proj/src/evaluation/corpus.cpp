#include "evaluation/corpus.hpp"

#include <istream>
#include <ostream>
#include <set>

#include "common/error.hpp"
#include "formal_langs/sampling.hpp"
#include "json.hpp"

namespace mlfw::eval {

std::vector<ContinuationRecord> records_for_string(const langs::LanguageSpec& spec,
                                                   std::span<const langs::Symbol> member) {
  if (!langs::membership(spec, member))
    fail(ErrorCode::InvalidArgument, "corpus strings must be members of " + std::string(spec.name_str()));
  std::vector<ContinuationRecord> out;
  langs::Cursor cursor(spec);
  for (std::size_t k = 0; k < member.size(); ++k) {
    cursor.advance(member[k]);
    ContinuationRecord r;
    r.lang = spec.name_str();
    r.prefix.assign(member.begin(), member.begin() + static_cast<std::ptrdiff_t>(k + 1));
    r.valid = cursor.continuations();
    r.length = cursor.length();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ContinuationRecord> build_eval_corpus(const langs::LanguageSpec& spec, Rng& rng,
                                                  const CorpusOptions& options) {
  if (options.max_length < 1 || options.strings_per_length < 1)
    fail(ErrorCode::InvalidArgument, "corpus needs max_length >= 1 and strings_per_length >= 1");
  std::vector<ContinuationRecord> out;
  std::set<SymbolString> seen;
  for (int length = 1; length <= options.max_length; ++length) {
    for (int i = 0; i < options.strings_per_length; ++i) {
      auto s = langs::sample_uniform(spec, length, rng);
      if (options.dedup && !seen.insert(s.symbols).second) continue;
      auto recs = records_for_string(spec, s.symbols);
      out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
  }
  return out;
}

void write_corpus(std::ostream& out, std::span<const ContinuationRecord> records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["lang"] = r.lang;
    j["prefix"] = r.prefix;
    j["valid"] = r.valid.ids();
    j["length"] = r.length;
    out << j.dump() << '\n';
  }
}

std::vector<ContinuationRecord> read_corpus(std::istream& in) {
  std::vector<ContinuationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ContinuationRecord r;
      r.lang = j.at("lang").get<std::string>();
      r.prefix = j.at("prefix").get<SymbolString>();
      const auto valid = j.at("valid").get<std::vector<langs::Symbol>>();
      for (auto s : valid)
        if (s < 0 || s >= langs::kVocabSize) fail(ErrorCode::Format, "token id out of range");
      for (auto s : r.prefix)
        if (s < langs::kFirstPayload || s >= langs::kVocabSize) fail(ErrorCode::Format, "prefix token out of range");
      r.valid = ContinuationSet::from_ids(valid);
      r.length = j.at("length").get<int>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Format, "corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::Format, "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<StringGroup> group_strings(std::span<const ContinuationRecord> records) {
  std::vector<StringGroup> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.prefix.size() == 1) {
      groups.push_back({i, i + 1});
      continue;
    }
    const bool extends = !groups.empty() && groups.back().end == i && records[i - 1].lang == r.lang &&
                         records[i - 1].prefix.size() + 1 == r.prefix.size() &&
                         std::equal(records[i - 1].prefix.begin(), records[i - 1].prefix.end(), r.prefix.begin());
    if (!extends) fail(ErrorCode::Format, "record " + std::to_string(i) + " does not extend the previous prefix");
    groups.back().end = i + 1;
  }
  return groups;
}

}  // namespace mlfw::eval
