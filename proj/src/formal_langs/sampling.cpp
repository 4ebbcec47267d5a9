#include "formal_langs/sampling.hpp"

#include "common/error.hpp"

namespace mlfw::langs {

BigInt count_strings(const LanguageSpec& spec, int length) {
  if (length < 1) return 0;
  return Cursor(spec).completions(length);
}

CanonicalString unrank(const LanguageSpec& spec, int length, const BigInt& rank_in) {
  const BigInt total = count_strings(spec, length);
  if (rank_in < 0 || rank_in >= total) {
    fail(ErrorCode::RankOutOfRange, "rank " + rank_in.str() + " outside [0, " + total.str() +
                                        ") for " + std::string(spec.name_str()) +
                                        " at length " + std::to_string(length));
  }
  BigInt rank = rank_in;
  Cursor cursor(spec);
  CanonicalString out;
  out.lang_length = length;
  for (;;) {
    if (cursor.accepting() && cursor.length() == length) {
      if (rank == 0) return out;
      rank -= 1;
    }
    bool moved = false;
    for (Symbol s : spec.alphabet()) {
      Cursor next = cursor;
      if (!next.advance(s)) continue;
      BigInt k = next.completions(length);
      if (rank < k) {
        cursor = std::move(next);
        out.symbols.push_back(s);
        moved = true;
        break;
      }
      rank -= k;
    }
    if (!moved) {
      fail(ErrorCode::RankOutOfRange, "unrank walked off the slice; completion counts are inconsistent");
    }
  }
}

BigInt rank(const LanguageSpec& spec, std::span<const Symbol> member) {
  if (!membership(spec, member)) {
    fail(ErrorCode::InvalidArgument, "rank: '" + spec.render(member) + "' is not a member");
  }
  const int length = prefix_length(spec, member);
  BigInt r = 0;
  Cursor cursor(spec);
  for (Symbol next_symbol : member) {
    if (cursor.accepting() && cursor.length() == length) r += 1;
    for (Symbol s : spec.alphabet()) {
      if (s == next_symbol) break;
      Cursor next = cursor;
      if (next.advance(s)) r += next.completions(length);
    }
    cursor.advance(next_symbol);
  }
  return r;
}

CanonicalString sample_uniform(const LanguageSpec& spec, int length, Rng& rng) {
  const BigInt total = count_strings(spec, length);
  if (total == 0) {
    fail(ErrorCode::EmptySlice, std::string(spec.name_str()) + " has no members of length " +
                                    std::to_string(length));
  }
  return unrank(spec, length, rng.below(total));
}

std::vector<CanonicalString> sample_by_length_range(const LanguageSpec& spec, int lo, int hi,
                                                    int n, Rng& rng) {
  if (lo < 1 || hi < lo) {
    fail(ErrorCode::InvalidArgument, "length range must satisfy 1 <= lo <= hi");
  }
  if (n < 0) fail(ErrorCode::InvalidArgument, "negative sample count");
  std::vector<CanonicalString> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int length = static_cast<int>(rng.between(lo, hi));
    out.push_back(sample_uniform(spec, length, rng));
  }
  return out;
}

}  // namespace mlfw::langs
