#include "formal_langs/corpus_io.hpp"

#include <ostream>

#include "json.hpp"

namespace mlfw::langs {

void write_string_corpus(std::ostream& out, const LanguageSpec& spec,
                         std::span<const CanonicalString> strings) {
  for (const auto& s : strings) {
    nlohmann::ordered_json line;
    line["lang"] = spec.name_str();
    line["symbols"] = s.symbols;
    line["length"] = s.lang_length;
    out << line.dump() << '\n';
  }
}

}  // namespace mlfw::langs
