#include "neural_core/batch.hpp"

#include <algorithm>

namespace mlfw::nn {

TokenBatch make_batch(std::span<const langs::SymbolString> payloads, int extra_pad) {
  TokenBatch out;
  out.batch = static_cast<int>(payloads.size());
  std::size_t longest = 0;
  for (const auto& p : payloads) longest = std::max(longest, p.size());
  out.length = static_cast<int>(longest) + 2 + std::max(0, extra_pad);
  out.tokens.assign(static_cast<std::size_t>(out.batch) * out.length, langs::kPad);
  for (int b = 0; b < out.batch; ++b) {
    const auto& p = payloads[static_cast<std::size_t>(b)];
    out.at(b, 0) = langs::kStart;
    for (std::size_t i = 0; i < p.size(); ++i) out.at(b, static_cast<int>(i) + 1) = p[i];
    out.at(b, static_cast<int>(p.size()) + 1) = langs::kStop;
  }
  return out;
}

}  // namespace mlfw::nn
