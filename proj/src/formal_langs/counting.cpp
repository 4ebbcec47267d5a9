#include "formal_langs/counting.hpp"

#include <mutex>
#include <vector>

namespace mlfw::langs::counting {
namespace {

// f(r, d) with r + d <= capacity, filled by increasing r + d.
class DyckTable {
 public:
  BigInt get(int r, int d) {
    std::lock_guard lock(mu_);
    ensure(r + d);
    return values_[index(r, d)];
  }

 private:
  static std::size_t index(int r, int d) {
    const auto s = static_cast<std::size_t>(r + d);
    return s * (s + 1) / 2 + static_cast<std::size_t>(r);
  }

  void ensure(int sum) {
    if (sum <= capacity_) return;
    const int cap = std::max(sum, std::max(32, 2 * capacity_));
    values_.assign(index(0, cap + 1), BigInt(0));
    for (int s = 0; s <= cap; ++s) {
      for (int r = 0; r <= s; ++r) {
        const int d = s - r;
        BigInt v = (r == 0 && d == 0) ? BigInt(1) : BigInt(0);
        if (r > 0) v += 2 * values_[index(r - 1, d + 1)];
        if (d > 0) v += values_[index(r, d - 1)];
        values_[index(r, d)] = std::move(v);
      }
    }
    capacity_ = cap;
  }

  std::mutex mu_;
  int capacity_ = -1;
  std::vector<BigInt> values_;
};

// g(r, p, b) with r + p + b <= capacity.
class CrossTable {
 public:
  BigInt get(int r, int p, int b) {
    std::lock_guard lock(mu_);
    ensure(r + p + b);
    return values_[index(r, p, b)];
  }

 private:
  // Triples with fixed sum s are laid out by r, then p; b is implied.
  static std::size_t tetra(std::size_t s) { return s * (s + 1) * (s + 2) / 6; }
  static std::size_t index(int r, int p, int b) {
    const auto s = static_cast<std::size_t>(r + p + b);
    const auto rr = static_cast<std::size_t>(r);
    // Triples with sum s and first coordinate < rr: sum_{k<rr} (s - k + 1).
    const std::size_t before_r = rr * (s + 1) - rr * (rr - 1) / 2;
    return tetra(s) + before_r + static_cast<std::size_t>(p);
  }

  void ensure(int sum) {
    if (sum <= capacity_) return;
    const int cap = std::max(sum, std::max(24, 2 * capacity_));
    values_.assign(tetra(static_cast<std::size_t>(cap) + 1), BigInt(0));
    for (int s = 0; s <= cap; ++s) {
      for (int r = 0; r <= s; ++r) {
        for (int p = 0; p <= s - r; ++p) {
          const int b = s - r - p;
          BigInt v = (s == 0) ? BigInt(1) : BigInt(0);
          if (r > 0) {
            v += values_[index(r - 1, p + 1, b)];
            v += values_[index(r - 1, p, b + 1)];
          }
          if (p > 0) v += values_[index(r, p - 1, b)];
          if (b > 0) v += values_[index(r, p, b - 1)];
          values_[index(r, p, b)] = std::move(v);
        }
      }
    }
    capacity_ = cap;
  }

  std::mutex mu_;
  int capacity_ = -1;
  std::vector<BigInt> values_;
};

DyckTable& dyck_table() {
  static DyckTable table;
  return table;
}

CrossTable& cross_table() {
  static CrossTable table;
  return table;
}

}  // namespace

BigInt dyck_completions(int remaining_opens, int depth) {
  if (remaining_opens < 0 || depth < 0) return 0;
  return dyck_table().get(remaining_opens, depth);
}

BigInt cross_dyck_completions(int remaining_opens, int paren_depth, int brace_depth) {
  if (remaining_opens < 0 || paren_depth < 0 || brace_depth < 0) return 0;
  return cross_table().get(remaining_opens, paren_depth, brace_depth);
}

BigInt power(unsigned base, int exponent) {
  if (exponent < 0) return 0;
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

}  // namespace mlfw::langs::counting
