#include "grammar_zoo/pattern.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "common/error.hpp"

namespace mlfw::zoo {
namespace {

void validate(const Node& n, int alphabet_size) {
  switch (n.kind) {
    case NodeKind::Literal:
      if (!n.children.empty() || n.symbol < 0 || n.symbol >= alphabet_size) {
        fail(ErrorCode::InvalidArgument, "literal outside the grammar alphabet");
      }
      return;
    case NodeKind::Concat:
    case NodeKind::Union:
      if (n.children.size() != 2) fail(ErrorCode::InvalidArgument, "cat/alt take two children");
      break;
    case NodeKind::Repeat:
      if (n.lo < 1 || n.hi < n.lo) fail(ErrorCode::InvalidArgument, "repetition needs 1 <= lo <= hi");
      [[fallthrough]];
    case NodeKind::Plus:
      if (n.children.size() != 1) fail(ErrorCode::InvalidArgument, "repetition takes one child");
      break;
  }
  for (const auto& c : n.children) validate(c, alphabet_size);
}

void write_sexpr(const Node& n, std::ostream& out) {
  switch (n.kind) {
    case NodeKind::Literal:
      out << "(lit " << static_cast<char>('a' + n.symbol) << ')';
      return;
    case NodeKind::Concat: out << "(cat "; break;
    case NodeKind::Union: out << "(alt "; break;
    case NodeKind::Repeat: out << "(rep " << n.lo << ' ' << n.hi << ' '; break;
    case NodeKind::Plus: out << "(plus "; break;
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i > 0) out << ' ';
    write_sexpr(n.children[i], out);
  }
  out << ')';
}

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  PatternGrammar grammar() {
    open();
    expect_word("sigma");
    const int k = integer();
    Node root = node();
    close();
    skip_space();
    if (pos_ != text_.size()) error("trailing characters");
    return PatternGrammar(std::move(root), k);
  }

 private:
  Node node() {
    open();
    const std::string head = word();
    Node out;
    if (head == "lit") {
      const std::string sym = word();
      if (sym.size() != 1 || sym[0] < 'a' || sym[0] > 'z') error("bad literal");
      out = Node::literal(sym[0] - 'a');
    } else if (head == "cat" || head == "alt") {
      Node left = node();
      Node right = node();
      out = head == "cat" ? Node::concat(std::move(left), std::move(right))
                          : Node::alt(std::move(left), std::move(right));
    } else if (head == "rep") {
      const int lo = integer();
      const int hi = integer();
      out = Node::repeat(node(), lo, hi);
    } else if (head == "plus") {
      out = Node::plus(node());
    } else {
      error("unknown form '" + head + "'");
    }
    close();
    return out;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void open() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(') error("expected '('");
    ++pos_;
  }
  void close() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ')') error("expected ')'");
    ++pos_;
  }
  std::string word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) error("expected a word");
    return std::string(text_.substr(start, pos_ - start));
  }
  void expect_word(std::string_view w) {
    if (word() != w) error("expected '" + std::string(w) + "'");
  }
  int integer() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const int v = std::stoi(w, &used);
      if (used != w.size()) error("bad integer '" + w + "'");
      return v;
    } catch (const std::logic_error&) {
      error("bad integer '" + w + "'");
    }
  }
  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCode::Format, "grammar s-expression at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void expand(const Node& n, Rng& rng, SymbolString& out) {
  switch (n.kind) {
    case NodeKind::Literal:
      out.push_back(langs::kFirstPayload + n.symbol);
      return;
    case NodeKind::Concat:
      expand(n.children[0], rng, out);
      expand(n.children[1], rng, out);
      return;
    case NodeKind::Union:
      expand(n.children[rng.below(2)], rng, out);
      return;
    case NodeKind::Repeat: {
      const auto times = rng.between(n.lo, n.hi);
      for (std::int64_t i = 0; i < times; ++i) expand(n.children[0], rng, out);
      return;
    }
    case NodeKind::Plus:
      expand(n.children[0], rng, out);
      while (out.size() < kSampleTruncation && rng.below(2) == 1) expand(n.children[0], rng, out);
      return;
  }
}

// End positions reachable by deriving `n` from `start`.
std::vector<bool> match(const Node& n, std::span<const Symbol> s, const std::vector<bool>& starts) {
  const std::size_t len = s.size();
  std::vector<bool> ends(len + 1, false);
  switch (n.kind) {
    case NodeKind::Literal:
      for (std::size_t i = 0; i < len; ++i) {
        if (starts[i] && s[i] == langs::kFirstPayload + n.symbol) ends[i + 1] = true;
      }
      break;
    case NodeKind::Concat:
      ends = match(n.children[1], s, match(n.children[0], s, starts));
      break;
    case NodeKind::Union: {
      auto left = match(n.children[0], s, starts);
      auto right = match(n.children[1], s, starts);
      for (std::size_t i = 0; i <= len; ++i) ends[i] = left[i] || right[i];
      break;
    }
    case NodeKind::Repeat: {
      auto frontier = starts;
      for (int k = 1; k <= n.hi; ++k) {
        frontier = match(n.children[0], s, frontier);
        if (k >= n.lo) {
          for (std::size_t i = 0; i <= len; ++i) ends[i] = ends[i] || frontier[i];
        }
      }
      break;
    }
    case NodeKind::Plus: {
      // Every iteration consumes at least one token, so len passes suffice.
      auto frontier = match(n.children[0], s, starts);
      for (std::size_t pass = 0; pass <= len; ++pass) {
        bool grew = false;
        for (std::size_t i = 0; i <= len; ++i) {
          if (frontier[i] && !ends[i]) ends[i] = grew = true;
        }
        if (!grew) break;
        frontier = match(n.children[0], s, frontier);
      }
      break;
    }
  }
  return ends;
}

}  // namespace

Node Node::literal(int symbol) {
  Node n;
  n.kind = NodeKind::Literal;
  n.symbol = symbol;
  return n;
}

Node Node::concat(Node left, Node right) {
  Node n;
  n.kind = NodeKind::Concat;
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

Node Node::alt(Node left, Node right) {
  Node n = concat(std::move(left), std::move(right));
  n.kind = NodeKind::Union;
  return n;
}

Node Node::repeat(Node child, int lo, int hi) {
  Node n;
  n.kind = NodeKind::Repeat;
  n.lo = lo;
  n.hi = hi;
  n.children.push_back(std::move(child));
  return n;
}

Node Node::plus(Node child) {
  Node n;
  n.kind = NodeKind::Plus;
  n.children.push_back(std::move(child));
  return n;
}

std::size_t Node::size() const {
  std::size_t total = 1;
  for (const auto& c : children) total += c.size();
  return total;
}

double mdl_score(const Node& n, int alphabet_size) {
  double bits = std::log2(static_cast<double>(kNodeKinds));
  if (n.kind == NodeKind::Literal) bits += std::log2(static_cast<double>(alphabet_size));
  if (n.kind == NodeKind::Repeat) bits += 2.0 * std::log2(static_cast<double>(n.hi) + 1.0);
  for (const auto& c : n.children) bits += mdl_score(c, alphabet_size);
  return bits;
}

PatternGrammar::PatternGrammar(Node root, int alphabet_size)
    : root_(std::move(root)), alphabet_size_(alphabet_size) {
  if (alphabet_size < 1 || alphabet_size > kMaxAlphabet) {
    fail(ErrorCode::InvalidArgument, "grammar alphabet must hold 1..7 symbols");
  }
  validate(root_, alphabet_size_);
  mdl_bits_ = mdl_score(root_, alphabet_size_);
}

std::string PatternGrammar::to_sexpr() const {
  std::ostringstream out;
  out << "(sigma " << alphabet_size_ << ' ';
  write_sexpr(root_, out);
  out << ')';
  return out.str();
}

PatternGrammar PatternGrammar::parse(std::string_view sexpr) { return SexprReader(sexpr).grammar(); }

SymbolString sample_string(const PatternGrammar& g, Rng& rng) {
  SymbolString out;
  expand(g.root(), rng, out);
  return out;
}

bool derives(const PatternGrammar& g, std::span<const Symbol> s) {
  if (s.empty()) return false;
  std::vector<bool> starts(s.size() + 1, false);
  starts[0] = true;
  return match(g.root(), s, starts)[s.size()];
}

Node random_tree(int nodes, int alphabet_size, Rng& rng) {
  if (nodes <= 1) return Node::literal(static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet_size))));
  if (nodes == 2) {
    Node child = random_tree(1, alphabet_size, rng);
    if (rng.below(2) == 0) return Node::plus(std::move(child));
    const int lo = static_cast<int>(rng.between(1, 3));
    return Node::repeat(std::move(child), lo, static_cast<int>(rng.between(lo, lo + 4)));
  }
  switch (rng.below(4)) {
    case 0:
    case 1: {
      const int left = static_cast<int>(rng.between(1, nodes - 2));
      Node l = random_tree(left, alphabet_size, rng);
      Node r = random_tree(nodes - 1 - left, alphabet_size, rng);
      return rng.below(2) == 0 ? Node::concat(std::move(l), std::move(r))
                               : Node::alt(std::move(l), std::move(r));
    }
    case 2: {
      const int lo = static_cast<int>(rng.between(1, 3));
      const int hi = static_cast<int>(rng.between(lo, lo + 4));
      return Node::repeat(random_tree(nodes - 1, alphabet_size, rng), lo, hi);
    }
    default:
      return Node::plus(random_tree(nodes - 1, alphabet_size, rng));
  }
}

}  // namespace mlfw::zoo
