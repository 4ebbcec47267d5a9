#pragma once

#include <vector>

#include "common/rng.hpp"
#include "formal_langs/language.hpp"

namespace mlfw::langs {

struct CanonicalString {
  SymbolString symbols;
  int lang_length = 0;

  bool operator==(const CanonicalString&) const = default;
};

// Exact size of the length-`length` slice of the language.
BigInt count_strings(const LanguageSpec& spec, int length);

// The rank-th member of the slice in lexicographic order of canonical ids
// (a proper prefix sorts before its extensions). Throws RankOutOfRange.
CanonicalString unrank(const LanguageSpec& spec, int length, const BigInt& rank);

// Inverse of unrank for members; throws InvalidArgument for non-members.
BigInt rank(const LanguageSpec& spec, std::span<const Symbol> member);

// Exactly uniform over the slice. Throws EmptySlice when it has no members.
CanonicalString sample_uniform(const LanguageSpec& spec, int length, Rng& rng);

// n draws: length uniform in [lo, hi], then a uniform member of that length.
std::vector<CanonicalString> sample_by_length_range(const LanguageSpec& spec, int lo, int hi,
                                                    int n, Rng& rng);

}  // namespace mlfw::langs
