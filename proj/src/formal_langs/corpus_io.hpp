#pragma once

#include <iosfwd>
#include <span>

#include "formal_langs/sampling.hpp"

namespace mlfw::langs {

// One JSON object per line: {"lang": name, "symbols": [ids], "length": n}.
void write_string_corpus(std::ostream& out, const LanguageSpec& spec,
                         std::span<const CanonicalString> strings);

}  // namespace mlfw::langs
