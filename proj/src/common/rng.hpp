#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace mlfw {

using BigInt = boost::multiprecision::cpp_int;

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over bytes; stable across platforms, used for seed derivation and
// content hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Seeded generator with platform-independent derived distributions.
// std::mt19937_64's output sequence is fixed by the standard; the standard
// distributions are not, so every draw used by the library goes through the
// members below.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);

  // Uniform in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  // Uniform in [0, bound) for arbitrary-precision bounds.
  BigInt below(const BigInt& bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Independent child stream keyed by a tag; does not advance this stream.
  Rng fork(std::string_view tag) const;
  Rng fork(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Seed for a named sub-computation of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

}  // namespace mlfw
