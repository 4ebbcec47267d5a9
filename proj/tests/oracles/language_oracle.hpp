#pragma once

// Test-only reference definitions of the nine languages. Nothing here calls
// into the recognizer under test: membership is decided directly from each
// language's textual definition on glyph strings, and prefix liveness comes
// from enumerating members with generators written from the definitions.

#include <algorithm>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

namespace mlfw::testing {

inline std::string reduce_pairs(std::string s, const std::vector<std::string>& units) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& u : units) {
      for (auto pos = s.find(u); pos != std::string::npos; pos = s.find(u)) {
        s.erase(pos, u.size());
        changed = true;
      }
    }
  }
  return s;
}

inline std::string keep_only(const std::string& s, const std::string& chars) {
  std::string out;
  for (char c : s) {
    if (chars.find(c) != std::string::npos) out += c;
  }
  return out;
}

// Definition-level membership on glyph strings.
inline bool oracle_member(const std::string& lang, const std::string& s, bool homogeneous = false) {
  if (s.empty()) return false;
  auto all_of = [&](const std::string& chars) {
    return std::all_of(s.begin(), s.end(), [&](char c) { return chars.find(c) != std::string::npos; });
  };
  if (lang == "an") return all_of("a");
  if (lang == "anbn" || lang == "anbncn") {
    const std::size_t k = lang == "anbn" ? 2 : 3;
    if (s.size() % k != 0) return false;
    const std::size_t n = s.size() / k;
    std::string want = std::string(n, 'a') + std::string(n, 'b') + (k == 3 ? std::string(n, 'c') : "");
    return s == want;
  }
  if (lang == "kleene") return all_of("abc");
  if (lang == "ww" || lang == "wwR") {
    const auto bar = s.find('|');
    if (bar == std::string::npos || s.find('|', bar + 1) != std::string::npos) return false;
    std::string w = s.substr(0, bar), v = s.substr(bar + 1);
    if (w.empty() || keep_only(w, "abc") != w) return false;
    if (lang == "wwR") std::reverse(v.begin(), v.end());
    return v == w;
  }
  if (lang == "pairs_n") {
    if (s.size() % 2 != 0) return false;
    for (std::size_t i = 0; i < s.size(); i += 2) {
      const std::string unit = s.substr(i, 2);
      if (unit != "()" && unit != "{}") return false;
      if (homogeneous && unit != s.substr(0, 2)) return false;
    }
    return true;
  }
  if (lang == "dyck") {
    if (!all_of("(){}")) return false;
    return reduce_pairs(s, {"()", "{}"}).empty();
  }
  if (lang == "cross_dyck") {
    if (!all_of("(){}")) return false;
    return reduce_pairs(keep_only(s, "()"), {"()"}).empty() &&
           reduce_pairs(keep_only(s, "{}"), {"{}"}).empty();
  }
  return false;
}

// Language-specific size measure, read straight off the glyph string.
inline int oracle_length(const std::string& lang, const std::string& s) {
  if (lang == "an" || lang == "anbn" || lang == "anbncn") {
    return static_cast<int>(std::count(s.begin(), s.end(), 'a'));
  }
  if (lang == "kleene") return static_cast<int>(s.size());
  if (lang == "ww" || lang == "wwR") {
    const auto bar = s.find('|');
    return static_cast<int>(bar == std::string::npos ? s.size() : bar);
  }
  return static_cast<int>(std::count(s.begin(), s.end(), '(') + std::count(s.begin(), s.end(), '{'));
}

inline std::string oracle_alphabet(const std::string& lang) {
  if (lang == "an") return "a";
  if (lang == "anbn") return "ab";
  if (lang == "anbncn" || lang == "kleene") return "abc";
  if (lang == "ww" || lang == "wwR") return "abc|";
  return "(){}";
}

// Every glyph string of length 0..max_len over the alphabet.
inline std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::vector<std::string> frontier{""};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto& s : frontier) {
      for (char c : alphabet) next.push_back(s + c);
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// Dyck words over the given bracket pairs with exactly `pairs` pairs, from
// the grammar S -> eps | open S close S. With `stop_at`, derivations are cut
// once that many symbols are produced and the partial word is emitted; every
// partial derivation of this grammar completes, so the cut words are exactly
// the member prefixes of that length.
inline void dyck_words(const std::vector<std::pair<char, char>>& kinds, int pairs,
                       const std::function<void(const std::string&)>& emit,
                       std::size_t stop_at = std::string::npos) {
  // Work list of pending items: '#k' nonterminal with k pairs, or a literal.
  struct Item {
    bool nonterminal;
    int size;
    char literal;
  };
  std::function<void(std::string&, std::vector<Item>&)> expand = [&](std::string& cur,
                                                                     std::vector<Item>& todo) {
    if (todo.empty() || cur.size() >= stop_at) {
      emit(cur);
      return;
    }
    Item item = todo.back();
    todo.pop_back();
    if (!item.nonterminal) {
      cur.push_back(item.literal);
      expand(cur, todo);
      cur.pop_back();
    } else if (item.size == 0) {
      expand(cur, todo);
    } else {
      for (int inner = 0; inner < item.size; ++inner) {
        for (auto [open, close] : kinds) {
          // S_n -> open S_inner close S_rest, pushed in reverse order.
          todo.push_back({true, item.size - 1 - inner, 0});
          todo.push_back({false, 0, close});
          todo.push_back({true, inner, 0});
          cur.push_back(open);
          expand(cur, todo);
          cur.pop_back();
          todo.pop_back();
          todo.pop_back();
          todo.pop_back();
        }
      }
    }
    todo.push_back(item);
  };
  std::string cur;
  std::vector<Item> todo{{true, pairs, 0}};
  expand(cur, todo);
}

// All members of the language with lang_length <= max_n, as glyph strings.
inline std::vector<std::string> oracle_members(const std::string& lang, int max_n,
                                               bool homogeneous = false) {
  std::vector<std::string> out;
  if (lang == "an" || lang == "anbn" || lang == "anbncn") {
    for (int n = 1; n <= max_n; ++n) {
      std::string s(n, 'a');
      if (lang != "an") s += std::string(n, 'b');
      if (lang == "anbncn") s += std::string(n, 'c');
      out.push_back(s);
    }
    return out;
  }
  if (lang == "kleene" || lang == "ww" || lang == "wwR") {
    for (const auto& w : all_strings("abc", static_cast<std::size_t>(max_n))) {
      if (w.empty()) continue;
      if (lang == "kleene") {
        out.push_back(w);
      } else {
        std::string v = w;
        if (lang == "wwR") std::reverse(v.begin(), v.end());
        out.push_back(w + "|" + v);
      }
    }
    return out;
  }
  if (lang == "pairs_n") {
    for (const auto& units : all_strings("ab", static_cast<std::size_t>(max_n))) {
      if (units.empty()) continue;
      if (homogeneous && units.find(units[0] == 'a' ? 'b' : 'a') != std::string::npos) continue;
      std::string s;
      for (char u : units) s += (u == 'a') ? "()" : "{}";
      out.push_back(s);
    }
    return out;
  }
  if (lang == "dyck") {
    for (int n = 1; n <= max_n; ++n) {
      dyck_words({{'(', ')'}, {'{', '}'}}, n, [&](const std::string& w) { out.push_back(w); });
    }
    return out;
  }
  if (lang == "cross_dyck") {
    // Every interleaving of a parenthesis word with a brace word.
    for (int n = 1; n <= max_n; ++n) {
      for (int p = 0; p <= n; ++p) {
        std::vector<std::string> parens, braces;
        dyck_words({{'(', ')'}}, p, [&](const std::string& w) { parens.push_back(w); });
        dyck_words({{'{', '}'}}, n - p, [&](const std::string& w) { braces.push_back(w); });
        for (const auto& u : parens) {
          for (const auto& v : braces) {
            std::function<void(std::size_t, std::size_t, std::string&)> mix =
                [&](std::size_t i, std::size_t j, std::string& cur) {
                  if (i == u.size() && j == v.size()) {
                    out.push_back(cur);
                    return;
                  }
                  if (i < u.size()) {
                    cur.push_back(u[i]);
                    mix(i + 1, j, cur);
                    cur.pop_back();
                  }
                  if (j < v.size()) {
                    cur.push_back(v[j]);
                    mix(i, j + 1, cur);
                    cur.pop_back();
                  }
                };
            std::string cur;
            mix(0, 0, cur);
          }
        }
      }
    }
    return out;
  }
  return out;
}

// Prefixes (length <= max_prefix) of members with lang_length <= max_n.
inline std::unordered_set<std::string> live_prefixes(const std::vector<std::string>& members,
                                                     std::size_t max_prefix) {
  std::unordered_set<std::string> out;
  for (const auto& m : members) {
    for (std::size_t k = 0; k <= std::min(max_prefix, m.size()); ++k) out.insert(m.substr(0, k));
  }
  return out;
}

// Live prefixes of length <= max_prefix. A live prefix of token length m
// needs at most m more opens-or-letters to close, so members with
// lang_length <= max_prefix cover every such prefix in all nine languages.
inline std::unordered_set<std::string> oracle_live_prefixes(const std::string& lang,
                                                            std::size_t max_prefix,
                                                            bool homogeneous = false) {
  const int max_n = static_cast<int>(max_prefix);
  if (lang == "dyck") {
    std::unordered_set<std::string> cut;
    for (int n = 1; n <= max_n; ++n) {
      dyck_words({{'(', ')'}, {'{', '}'}}, n, [&](const std::string& w) { cut.insert(w); },
                 max_prefix);
    }
    return live_prefixes({cut.begin(), cut.end()}, max_prefix);
  }
  if (lang == "cross_dyck") {
    std::unordered_set<std::string> cut;
    for (int n = 1; n <= max_n; ++n) {
      for (int p = 0; p <= n; ++p) {
        std::unordered_set<std::string> parens, braces;
        dyck_words({{'(', ')'}}, p, [&](const std::string& w) { parens.insert(w); }, max_prefix);
        dyck_words({{'{', '}'}}, n - p, [&](const std::string& w) { braces.insert(w); }, max_prefix);
        for (const auto& u : parens) {
          for (const auto& v : braces) {
            std::function<void(std::size_t, std::size_t, std::string&)> mix =
                [&](std::size_t i, std::size_t j, std::string& cur) {
                  if ((i == u.size() && j == v.size()) || cur.size() >= max_prefix) {
                    cut.insert(cur);
                    return;
                  }
                  if (i < u.size()) {
                    cur.push_back(u[i]);
                    mix(i + 1, j, cur);
                    cur.pop_back();
                  }
                  if (j < v.size()) {
                    cur.push_back(v[j]);
                    mix(i, j + 1, cur);
                    cur.pop_back();
                  }
                };
            std::string cur;
            mix(0, 0, cur);
          }
        }
      }
    }
    return live_prefixes({cut.begin(), cut.end()}, max_prefix);
  }
  return live_prefixes(oracle_members(lang, max_n, homogeneous), max_prefix);
}

}  // namespace mlfw::testing
