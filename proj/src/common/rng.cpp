#include "common/rng.hpp"

#include <string>

#include "common/error.hpp"

namespace mlfw {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::InvalidArgument, "Rng::below: zero bound");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) fail(ErrorCode::InvalidArgument, "Rng::between: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  return lo + static_cast<std::int64_t>(below(span));
}

BigInt Rng::below(const BigInt& bound) {
  if (bound <= 0) fail(ErrorCode::InvalidArgument, "Rng::below: nonpositive bound");
  if (bound <= BigInt(UINT64_MAX)) {
    return BigInt(below(static_cast<std::uint64_t>(bound)));
  }
  const unsigned bits = boost::multiprecision::msb(bound) + 1;
  const unsigned words = (bits + 63) / 64;
  const unsigned spare = words * 64 - bits;
  for (;;) {
    BigInt x = 0;
    for (unsigned w = 0; w < words; ++w) {
      std::uint64_t word = engine_();
      if (w == 0 && spare > 0) word >>= spare;
      x <<= 64;
      x |= word;
    }
    if (x < bound) return x;
  }
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Rng Rng::fork(std::string_view tag) const { return Rng(derive_seed(seed_, tag)); }

Rng Rng::fork(std::uint64_t index) const {
  return Rng(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return splitmix64(fnv1a64(tag) ^ splitmix64(master));
}

}  // namespace mlfw
