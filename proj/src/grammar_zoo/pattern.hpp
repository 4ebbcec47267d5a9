#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/rng.hpp"
#include "formal_langs/language.hpp"

namespace mlfw::zoo {

using langs::Symbol;
using langs::SymbolString;

inline constexpr int kMaxAlphabet = langs::kPayloadCount;
inline constexpr int kNodeKinds = 5;
// Unbounded repetition stops growing once a sampled string reaches this many
// tokens.
inline constexpr std::size_t kSampleTruncation = 50;

enum class NodeKind { Literal, Concat, Union, Repeat, Plus };

// Rule tree. Concat and Union are binary; Repeat matches its child lo..hi
// times (1 <= lo <= hi); Plus matches it one or more times. No node derives
// the empty string.
struct Node {
  NodeKind kind = NodeKind::Literal;
  int symbol = 0;  // Literal: alphabet index 0..alphabet_size-1
  int lo = 1, hi = 1;
  std::vector<Node> children;

  static Node literal(int symbol);
  static Node concat(Node left, Node right);
  static Node alt(Node left, Node right);
  static Node repeat(Node child, int lo, int hi);
  static Node plus(Node child);

  std::size_t size() const;
  bool operator==(const Node&) const = default;
};

class PatternGrammar {
 public:
  // Throws InvalidArgument for malformed trees (bad literal index, lo > hi,
  // wrong arity, alphabet outside 1..7).
  PatternGrammar(Node root, int alphabet_size);

  const Node& root() const noexcept { return root_; }
  int alphabet_size() const noexcept { return alphabet_size_; }
  double mdl_bits() const noexcept { return mdl_bits_; }

  // "(sigma K expr)" where expr uses (lit a) (cat x y) (alt x y)
  // (rep lo hi x) (plus x).
  std::string to_sexpr() const;
  static PatternGrammar parse(std::string_view sexpr);

  bool operator==(const PatternGrammar& other) const {
    return alphabet_size_ == other.alphabet_size_ && root_ == other.root_;
  }

 private:
  Node root_;
  int alphabet_size_;
  double mdl_bits_;
};

// Description length in bits: log2(5) per node to select its kind,
// log2(|alphabet|) per literal, 2*log2(hi+1) per bounded repetition.
double mdl_score(const Node& root, int alphabet_size);

// Top-down expansion emitting canonical payload ids (alphabet index + 3).
SymbolString sample_string(const PatternGrammar& g, Rng& rng);

// Derivation-tracking recognizer for canonical payload ids.
bool derives(const PatternGrammar& g, std::span<const Symbol> s);

// Random rule tree with exactly `nodes` nodes (nodes >= 1).
Node random_tree(int nodes, int alphabet_size, Rng& rng);

}  // namespace mlfw::zoo
