#include "formal_langs/language.hpp"

#include <bit>

#include "common/error.hpp"
#include "formal_langs/counting.hpp"

namespace mlfw::langs {
namespace {

constexpr Symbol kA = 3, kB = 4, kC = 5, kBar = 6;
constexpr Symbol kParenOpen = 3, kParenClose = 4, kBraceOpen = 5, kBraceClose = 6;

constexpr std::array<LangName, 9> kAllNames = {
    LangName::An,     LangName::Anbn,   LangName::Anbncn,
    LangName::Kleene, LangName::WwR,    LangName::Ww,
    LangName::PairsN, LangName::Dyck,   LangName::CrossDyck};

bool is_open(Symbol s) { return s == kParenOpen || s == kBraceOpen; }
Symbol closer_of(Symbol open) { return open == kParenOpen ? kParenClose : kBraceClose; }

}  // namespace

const char* to_string(LangName name) {
  switch (name) {
    case LangName::An: return "an";
    case LangName::Anbn: return "anbn";
    case LangName::Anbncn: return "anbncn";
    case LangName::Kleene: return "kleene";
    case LangName::WwR: return "wwR";
    case LangName::Ww: return "ww";
    case LangName::PairsN: return "pairs_n";
    case LangName::Dyck: return "dyck";
    case LangName::CrossDyck: return "cross_dyck";
  }
  return "?";
}

const char* to_string(Family family) {
  switch (family) {
    case Family::Growing: return "Growing";
    case Family::Copy: return "Copy";
    case Family::Dyck: return "Dyck";
  }
  return "?";
}

const char* to_string(ChomskyLevel level) {
  switch (level) {
    case ChomskyLevel::Regular: return "Regular";
    case ChomskyLevel::ContextFree: return "ContextFree";
    case ChomskyLevel::ContextSensitive: return "ContextSensitive";
  }
  return "?";
}

LanguageSpec::LanguageSpec(LangName name, bool pairs_homogeneous)
    : name_(name), pairs_homogeneous_(pairs_homogeneous && name == LangName::PairsN) {
  switch (name) {
    case LangName::An:
      family_ = Family::Growing, level_ = ChomskyLevel::Regular;
      alphabet_ = {kA}, alphabet_size_ = 1;
      break;
    case LangName::Anbn:
      family_ = Family::Growing, level_ = ChomskyLevel::ContextFree;
      alphabet_ = {kA, kB}, alphabet_size_ = 2;
      break;
    case LangName::Anbncn:
      family_ = Family::Growing, level_ = ChomskyLevel::ContextSensitive;
      alphabet_ = {kA, kB, kC}, alphabet_size_ = 3;
      break;
    case LangName::Kleene:
      family_ = Family::Copy, level_ = ChomskyLevel::Regular;
      alphabet_ = {kA, kB, kC}, alphabet_size_ = 3;
      break;
    case LangName::WwR:
      family_ = Family::Copy, level_ = ChomskyLevel::ContextFree;
      alphabet_ = {kA, kB, kC, kBar}, alphabet_size_ = 4;
      break;
    case LangName::Ww:
      family_ = Family::Copy, level_ = ChomskyLevel::ContextSensitive;
      alphabet_ = {kA, kB, kC, kBar}, alphabet_size_ = 4;
      break;
    case LangName::PairsN:
      family_ = Family::Dyck, level_ = ChomskyLevel::Regular;
      alphabet_ = {kParenOpen, kParenClose, kBraceOpen, kBraceClose}, alphabet_size_ = 4;
      break;
    case LangName::Dyck:
      family_ = Family::Dyck, level_ = ChomskyLevel::ContextFree;
      alphabet_ = {kParenOpen, kParenClose, kBraceOpen, kBraceClose}, alphabet_size_ = 4;
      break;
    case LangName::CrossDyck:
      family_ = Family::Dyck, level_ = ChomskyLevel::ContextSensitive;
      alphabet_ = {kParenOpen, kParenClose, kBraceOpen, kBraceClose}, alphabet_size_ = 4;
      break;
  }
}

LanguageSpec LanguageSpec::get(LangName name, bool pairs_homogeneous) {
  return LanguageSpec(name, pairs_homogeneous);
}

LanguageSpec LanguageSpec::parse(std::string_view name, bool pairs_homogeneous) {
  for (LangName n : kAllNames) {
    if (name == to_string(n)) return LanguageSpec(n, pairs_homogeneous);
  }
  if (name == "wwr") return LanguageSpec(LangName::WwR, false);
  fail(ErrorCode::InvalidArgument, "unknown language '" + std::string(name) + "'");
}

const std::array<LangName, 9>& LanguageSpec::all_names() { return kAllNames; }

bool LanguageSpec::in_alphabet(Symbol s) const noexcept {
  for (Symbol a : alphabet()) {
    if (a == s) return true;
  }
  return false;
}

std::string LanguageSpec::glyph(Symbol s) const {
  switch (s) {
    case kStart: return "[Start]";
    case kStop: return "[Stop]";
    case kPad: return "[Pad]";
    default: break;
  }
  if (!in_alphabet(s)) return "?" + std::to_string(s);
  if (family_ == Family::Dyck) {
    static constexpr char kBrackets[] = {'(', ')', '{', '}'};
    return std::string(1, kBrackets[s - kFirstPayload]);
  }
  if (s == kBar) return "|";
  return std::string(1, static_cast<char>('a' + (s - kFirstPayload)));
}

std::string LanguageSpec::render(std::span<const Symbol> symbols) const {
  std::string out;
  for (Symbol s : symbols) out += glyph(s);
  return out;
}

SymbolString LanguageSpec::parse_glyphs(std::string_view text) const {
  SymbolString out;
  out.reserve(text.size());
  for (char ch : text) {
    bool found = false;
    for (Symbol s : alphabet()) {
      if (glyph(s) == std::string_view(&ch, 1)) {
        out.push_back(s);
        found = true;
        break;
      }
    }
    if (!found) {
      fail(ErrorCode::UnknownSymbol,
           "symbol '" + std::string(1, ch) + "' is not in the alphabet of " + std::string(name_str()));
    }
  }
  return out;
}

ContinuationSet ContinuationSet::from_ids(std::span<const Symbol> ids) {
  ContinuationSet out;
  for (Symbol s : ids) {
    if (s < 0 || s >= kVocabSize) fail(ErrorCode::UnknownSymbol, "token id out of range");
    out.insert(s);
  }
  return out;
}

std::size_t ContinuationSet::size() const noexcept {
  return static_cast<std::size_t>(std::popcount(bits_));
}

std::vector<Symbol> ContinuationSet::ids() const {
  std::vector<Symbol> out;
  for (Symbol s = 0; s < kVocabSize; ++s) {
    if (contains(s)) out.push_back(s);
  }
  return out;
}

Cursor::Cursor(const LanguageSpec& spec) : spec_(spec) {}

bool Cursor::advance(Symbol s) {
  if (!spec_.in_alphabet(s)) {
    fail(ErrorCode::UnknownSymbol, "token " + std::to_string(s) + " is not in the alphabet of " +
                                       std::string(spec_.name_str()));
  }
  switch (spec_.name()) {
    case LangName::An:
      ++a_;
      break;
    case LangName::Anbn:
      if (s == kA) {
        if (phase_ != 0) return false;
        ++a_;
      } else {
        if (a_ == 0 || b_ >= a_) return false;
        phase_ = 1;
        ++b_;
      }
      break;
    case LangName::Anbncn:
      if (s == kA) {
        if (phase_ != 0) return false;
        ++a_;
      } else if (s == kB) {
        if (phase_ > 1 || a_ == 0 || b_ >= a_) return false;
        phase_ = 1;
        ++b_;
      } else {
        if (phase_ == 0 || b_ != a_ || c_ >= a_) return false;
        phase_ = 2;
        ++c_;
      }
      break;
    case LangName::Kleene:
      ++a_;
      break;
    case LangName::WwR:
    case LangName::Ww:
      if (phase_ == 0) {
        if (s == kBar) {
          if (stack_.empty()) return false;
          phase_ = 1;
        } else {
          stack_.push_back(s);
        }
      } else {
        if (s == kBar || copy_pos_ >= stack_.size()) return false;
        const Symbol expected = spec_.name() == LangName::Ww
                                    ? stack_[copy_pos_]
                                    : stack_[stack_.size() - 1 - copy_pos_];
        if (s != expected) return false;
        ++copy_pos_;
      }
      break;
    case LangName::PairsN:
      if (pending_close_ >= 0) {
        if (s != pending_close_) return false;
        pending_close_ = -1;
      } else {
        if (!is_open(s)) return false;
        if (spec_.pairs_homogeneous() && first_open_ >= 0 && s != first_open_) return false;
        if (first_open_ < 0) first_open_ = s;
        pending_close_ = closer_of(s);
        ++opens_;
      }
      break;
    case LangName::Dyck:
      if (is_open(s)) {
        stack_.push_back(s);
        ++opens_;
      } else {
        if (stack_.empty() || closer_of(stack_.back()) != s) return false;
        stack_.pop_back();
      }
      break;
    case LangName::CrossDyck:
      if (s == kParenOpen) {
        ++paren_depth_, ++opens_;
      } else if (s == kBraceOpen) {
        ++brace_depth_, ++opens_;
      } else if (s == kParenClose) {
        if (paren_depth_ == 0) return false;
        --paren_depth_;
      } else {
        if (brace_depth_ == 0) return false;
        --brace_depth_;
      }
      break;
  }
  ++tokens_;
  return true;
}

bool Cursor::accepting() const noexcept {
  switch (spec_.name()) {
    case LangName::An: return a_ > 0;
    case LangName::Anbn: return a_ > 0 && b_ == a_;
    case LangName::Anbncn: return a_ > 0 && c_ == a_;
    case LangName::Kleene: return a_ > 0;
    case LangName::WwR:
    case LangName::Ww: return phase_ == 1 && copy_pos_ == stack_.size();
    case LangName::PairsN: return opens_ > 0 && pending_close_ < 0;
    case LangName::Dyck: return opens_ > 0 && stack_.empty();
    case LangName::CrossDyck: return opens_ > 0 && paren_depth_ == 0 && brace_depth_ == 0;
  }
  return false;
}

int Cursor::length() const noexcept {
  switch (spec_.family()) {
    case Family::Growing: return a_;
    case Family::Copy:
      return spec_.name() == LangName::Kleene ? a_ : static_cast<int>(stack_.size());
    case Family::Dyck: return opens_;
  }
  return 0;
}

ContinuationSet Cursor::continuations() const {
  ContinuationSet out;
  for (Symbol s : spec_.alphabet()) {
    Cursor next = *this;
    if (next.advance(s)) out.insert(s);
  }
  if (accepting()) out.insert(kStop);
  return out;
}

BigInt Cursor::completions(int target) const {
  if (target < 1) return 0;
  const int len = length();
  if (len > target) return 0;
  switch (spec_.name()) {
    case LangName::An: return 1;
    case LangName::Anbn:
    case LangName::Anbncn: return (phase_ == 0 || a_ == target) ? 1 : 0;
    case LangName::Kleene: return counting::power(3, target - len);
    case LangName::WwR:
    case LangName::Ww:
      if (phase_ == 1) return len == target ? 1 : 0;
      return counting::power(3, target - len);
    case LangName::PairsN:
      if (!spec_.pairs_homogeneous()) return counting::power(2, target - len);
      return opens_ == 0 ? 2 : 1;
    case LangName::Dyck:
      return counting::dyck_completions(target - opens_, static_cast<int>(stack_.size()));
    case LangName::CrossDyck:
      return counting::cross_dyck_completions(target - opens_, paren_depth_, brace_depth_);
  }
  return 0;
}

Cursor cursor_after(const LanguageSpec& spec, std::span<const Symbol> prefix) {
  Cursor cursor(spec);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!cursor.advance(prefix[i])) {
      fail(ErrorCode::DeadPrefix, "prefix '" + spec.render(prefix.first(i + 1)) +
                                      "' cannot be extended to a member of " +
                                      std::string(spec.name_str()));
    }
  }
  return cursor;
}

bool membership(const LanguageSpec& spec, std::span<const Symbol> s) {
  Cursor cursor(spec);
  for (Symbol x : s) {
    if (!cursor.advance(x)) {
      // Keep validating the alphabet so UnknownSymbol wins over rejection.
      for (Symbol rest : s) {
        if (!spec.in_alphabet(rest)) cursor.advance(rest);
      }
      return false;
    }
  }
  return cursor.accepting();
}

ContinuationSet valid_continuations(const LanguageSpec& spec, std::span<const Symbol> prefix) {
  return cursor_after(spec, prefix).continuations();
}

int prefix_length(const LanguageSpec& spec, std::span<const Symbol> prefix) {
  return cursor_after(spec, prefix).length();
}

}  // namespace mlfw::langs
