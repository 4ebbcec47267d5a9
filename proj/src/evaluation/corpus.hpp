#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "formal_langs/language.hpp"

namespace mlfw::eval {

using langs::ContinuationSet;
using langs::SymbolString;

struct ContinuationRecord {
  std::string lang;
  SymbolString prefix;
  ContinuationSet valid;
  int length = 0;

  bool operator==(const ContinuationRecord&) const = default;
};

struct CorpusOptions {
  int max_length = 40;
  int strings_per_length = 10;
  bool dedup = false;  // drop repeated strings within a language
};

// One record per nonempty prefix (the full string included) of the given
// member, in prefix order.
std::vector<ContinuationRecord> records_for_string(const langs::LanguageSpec& spec,
                                                   std::span<const langs::Symbol> member);

// strings_per_length uniform draws at every language length 1..max_length,
// expanded into prefix records.
std::vector<ContinuationRecord> build_eval_corpus(const langs::LanguageSpec& spec, Rng& rng,
                                                  const CorpusOptions& options = {});

// JSONL, one {"lang", "prefix", "valid", "length"} object per line.
void write_corpus(std::ostream& out, std::span<const ContinuationRecord> records);
std::vector<ContinuationRecord> read_corpus(std::istream& in);

// Consecutive records of one string: [begin, end) whose last prefix is the
// full string. A new group starts whenever the prefix has one token; any
// other break in the prefix chain throws Format.
struct StringGroup {
  std::size_t begin = 0, end = 0;
};
std::vector<StringGroup> group_strings(std::span<const ContinuationRecord> records);

}  // namespace mlfw::eval
