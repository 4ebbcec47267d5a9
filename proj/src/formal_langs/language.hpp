#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/rng.hpp"

namespace mlfw::langs {

using Symbol = int;
using SymbolString = std::vector<Symbol>;

inline constexpr Symbol kStart = 0;
inline constexpr Symbol kStop = 1;
inline constexpr Symbol kPad = 2;
inline constexpr Symbol kFirstPayload = 3;
inline constexpr int kVocabSize = 10;
inline constexpr int kPayloadCount = kVocabSize - kFirstPayload;

enum class LangName { An, Anbn, Anbncn, Kleene, WwR, Ww, PairsN, Dyck, CrossDyck };
enum class Family { Growing, Copy, Dyck };
enum class ChomskyLevel { Regular, ContextFree, ContextSensitive };

const char* to_string(LangName name);
const char* to_string(Family family);
const char* to_string(ChomskyLevel level);

// One of the nine target languages together with its canonical alphabet.
// Canonical payload ids are assigned in alphabet order starting at 3:
//   Growing  a=3 b=4 c=5
//   Copy     a=3 b=4 c=5 |=6
//   Dyck     (=3 )=4 {=5 }=6
class LanguageSpec {
 public:
  static LanguageSpec get(LangName name, bool pairs_homogeneous = false);
  // Throws InvalidArgument on an unknown name.
  static LanguageSpec parse(std::string_view name, bool pairs_homogeneous = false);
  static const std::array<LangName, 9>& all_names();

  LangName name() const noexcept { return name_; }
  Family family() const noexcept { return family_; }
  ChomskyLevel level() const noexcept { return level_; }
  std::string_view name_str() const { return to_string(name_); }
  std::span<const Symbol> alphabet() const noexcept { return {alphabet_.data(), alphabet_size_}; }
  bool pairs_homogeneous() const noexcept { return pairs_homogeneous_; }
  bool in_alphabet(Symbol s) const noexcept;

  // Display glyph for a canonical id ('a', '(', '|', ...). Reserved tokens
  // render as their bracketed names.
  std::string glyph(Symbol s) const;
  std::string render(std::span<const Symbol> symbols) const;
  // Inverse of render for payload-only strings; throws UnknownSymbol.
  SymbolString parse_glyphs(std::string_view text) const;

  bool operator==(const LanguageSpec&) const = default;

 private:
  LanguageSpec(LangName name, bool pairs_homogeneous);

  LangName name_;
  Family family_;
  ChomskyLevel level_;
  std::array<Symbol, 4> alphabet_{};
  std::size_t alphabet_size_ = 0;
  bool pairs_homogeneous_ = false;
};

// Set of valid next tokens: payload ids and possibly STOP.
class ContinuationSet {
 public:
  ContinuationSet() = default;
  static ContinuationSet from_ids(std::span<const Symbol> ids);

  void insert(Symbol s) { bits_ |= static_cast<std::uint16_t>(1u << s); }
  bool contains(Symbol s) const noexcept { return s >= 0 && s < kVocabSize && (bits_ >> s) & 1u; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  std::vector<Symbol> ids() const;
  std::uint16_t bits() const noexcept { return bits_; }

  bool operator==(const ContinuationSet&) const = default;

 private:
  std::uint16_t bits_ = 0;
};

// Incremental recognizer. Every reachable state is live: advance() refuses
// any symbol after which no member of the language can be reached.
class Cursor {
 public:
  explicit Cursor(const LanguageSpec& spec);

  // Returns false (leaving the state untouched) when the extended prefix is
  // dead. Throws UnknownSymbol for symbols outside the alphabet.
  bool advance(Symbol s);

  bool accepting() const noexcept;
  int length() const noexcept;
  std::size_t tokens() const noexcept { return tokens_; }
  ContinuationSet continuations() const;

  // Number of members with lang_length == target that extend this prefix
  // (counting the prefix itself when it is such a member).
  BigInt completions(int target) const;

  const LanguageSpec& spec() const noexcept { return spec_; }

 private:
  LanguageSpec spec_;
  std::size_t tokens_ = 0;
  int phase_ = 0;
  int a_ = 0, b_ = 0, c_ = 0;
  int opens_ = 0;
  int paren_depth_ = 0, brace_depth_ = 0;
  Symbol pending_close_ = -1;
  Symbol first_open_ = -1;
  std::size_t copy_pos_ = 0;
  std::vector<Symbol> stack_;
};

// Membership of a payload-only symbol string. Empty string is never a member.
bool membership(const LanguageSpec& spec, std::span<const Symbol> s);

// Throws DeadPrefix if no member starts with `prefix`.
ContinuationSet valid_continuations(const LanguageSpec& spec, std::span<const Symbol> prefix);
int prefix_length(const LanguageSpec& spec, std::span<const Symbol> prefix);

// Cursor positioned after `prefix`; throws DeadPrefix / UnknownSymbol.
Cursor cursor_after(const LanguageSpec& spec, std::span<const Symbol> prefix);

}  // namespace mlfw::langs
