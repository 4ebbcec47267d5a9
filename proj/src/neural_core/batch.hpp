#pragma once

#include <span>
#include <vector>

#include "formal_langs/language.hpp"

namespace mlfw::nn {

// Row-major [batch x length] token matrix; each row is START, payload...,
// STOP, PAD...
struct TokenBatch {
  int batch = 0;
  int length = 0;
  std::vector<int> tokens;

  int at(int b, int t) const { return tokens[static_cast<std::size_t>(b) * length + t]; }
  int& at(int b, int t) { return tokens[static_cast<std::size_t>(b) * length + t]; }
};

// Frames each payload as START payload STOP and pads to the longest row plus
// `extra_pad` columns.
TokenBatch make_batch(std::span<const langs::SymbolString> payloads, int extra_pad = 0);

}  // namespace mlfw::nn
