#pragma once

#include "common/rng.hpp"

namespace mlfw::langs::counting {

// Completions of a two-type Dyck prefix that still needs `remaining_opens`
// opening brackets and currently sits at nesting depth `depth`.
BigInt dyck_completions(int remaining_opens, int depth);

// Completions of a cross-serial Dyck prefix: parentheses and braces are
// balanced independently, so the state is the pair of depths.
BigInt cross_dyck_completions(int remaining_opens, int paren_depth, int brace_depth);

BigInt power(unsigned base, int exponent);

}  // namespace mlfw::langs::counting
