#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"

#include "common/error.hpp"
#include "grammar_zoo/pattern.hpp"
#include "grammar_zoo/zoo.hpp"

using namespace mlfw;
using namespace mlfw::zoo;

TEST_CASE("mdl cost table") {
  PatternGrammar a(Node::literal(0), 3);
  CHECK(a.mdl_bits() == doctest::Approx(std::log2(5.0) + std::log2(3.0)).epsilon(1e-12));
  CHECK(a.mdl_bits() == doctest::Approx(3.907).epsilon(1e-3));

  PatternGrammar aa(Node::concat(Node::literal(0), Node::literal(0)), 3);
  CHECK(aa.mdl_bits() == doctest::Approx(10.136).epsilon(1e-3));

  PatternGrammar rep(Node::repeat(Node::literal(1), 1, 3), 2);
  CHECK(rep.mdl_bits() == doctest::Approx(2 * std::log2(5.0) + 1.0 + 2 * std::log2(4.0)));

  CHECK(mdl_score(aa.root(), 3) == aa.mdl_bits());
  CHECK(PatternGrammar(Node::literal(0), 1).mdl_bits() == doctest::Approx(std::log2(5.0)));
}

TEST_CASE("malformed trees are rejected") {
  CHECK_THROWS_AS(PatternGrammar(Node::literal(3), 3), Error);
  CHECK_THROWS_AS(PatternGrammar(Node::repeat(Node::literal(0), 3, 2), 3), Error);
  CHECK_THROWS_AS(PatternGrammar(Node::literal(0), 8), Error);
  CHECK_THROWS_AS(PatternGrammar::parse("(sigma 2 (lit a)"), Error);
  CHECK_THROWS_AS(PatternGrammar::parse("(sigma 2 (star (lit a)))"), Error);
}

TEST_CASE("s-expressions round-trip") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const int k = static_cast<int>(rng.between(1, 7));
    PatternGrammar g(random_tree(static_cast<int>(rng.between(1, 30)), k, rng), k);
    auto back = PatternGrammar::parse(g.to_sexpr());
    CHECK(back == g);
    CHECK(back.mdl_bits() == g.mdl_bits());
  }
  CHECK(PatternGrammar::parse("(sigma 3 (cat (lit a) (rep 1 2 (alt (lit b) (plus (lit c))))))")
            .to_sexpr() == "(sigma 3 (cat (lit a) (rep 1 2 (alt (lit b) (plus (lit c))))))");
}

TEST_CASE("sample_string on fixed grammars") {
  Rng rng(1);
  PatternGrammar a(Node::literal(0), 3);
  PatternGrammar ab(Node::concat(Node::literal(0), Node::literal(1)), 3);
  for (int i = 0; i < 10; ++i) {
    CHECK(sample_string(a, rng) == SymbolString{3});
    CHECK(sample_string(ab, rng) == SymbolString{3, 4});
  }
  PatternGrammar many(Node::plus(Node::literal(2)), 3);
  std::size_t longest = 0;
  for (int i = 0; i < 2000; ++i) longest = std::max(longest, sample_string(many, rng).size());
  CHECK(longest <= kSampleTruncation);
  CHECK(longest > 5);
}

TEST_CASE("recognizer accepts every sampled string and rejects perturbations") {
  Rng rng(21);
  int rejected = 0;
  for (int i = 0; i < 300; ++i) {
    const int k = static_cast<int>(rng.between(1, 7));
    Node tree = random_tree(static_cast<int>(rng.between(1, 25)), k, rng);
    if (base_length(tree) > kMaxBaseLength) continue;
    PatternGrammar g(std::move(tree), k);
    for (int j = 0; j < 5; ++j) {
      auto s = sample_string(g, rng);
      REQUIRE_FALSE(s.empty());
      CHECK_MESSAGE(derives(g, s), g.to_sexpr());
      // Symbols outside the alphabet can never be derived.
      auto bad = s;
      bad[rng.below(bad.size())] = langs::kFirstPayload + k;
      if (k < kMaxAlphabet) {
        CHECK_FALSE(derives(g, bad));
        ++rejected;
      }
    }
  }
  CHECK(rejected > 0);
  PatternGrammar r(Node::repeat(Node::literal(0), 2, 3), 1);
  CHECK_FALSE(derives(r, SymbolString{3}));
  CHECK(derives(r, SymbolString{3, 3}));
  CHECK(derives(r, SymbolString{3, 3, 3}));
  CHECK_FALSE(derives(r, SymbolString{3, 3, 3, 3}));
  CHECK_FALSE(derives(r, SymbolString{}));
}

TEST_CASE("zoo construction fills every MDL decile") {
  Zoo zoo = build_zoo(5000, 0, 100, 42);
  CHECK(zoo.grammars.size() == 5000);
  auto stats = zoo_stats(zoo);
  for (auto count : stats.histogram) {
    CHECK(count >= 450);
    CHECK(count <= 550);
  }
  CHECK(stats.min_mdl >= 0.0);
  CHECK(stats.max_mdl <= 100.0);
  for (const auto& g : zoo.grammars) CHECK(base_length(g.root()) <= kMaxBaseLength);

  Zoo small = build_zoo(10, 0, 100, 42);
  auto small_stats = zoo_stats(small);
  for (auto count : small_stats.histogram) CHECK(count == 1);

  Zoo again = build_zoo(10, 0, 100, 42);
  REQUIRE(again.grammars.size() == small.grammars.size());
  for (std::size_t i = 0; i < small.grammars.size(); ++i) CHECK(again.grammars[i] == small.grammars[i]);

  try {
    build_zoo(10, 0, 1, 1, 50);
    FAIL("expected BinUnfillable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BinUnfillable);
  }
}

TEST_CASE("zoo JSON round-trip") {
  Zoo zoo = build_zoo(40, 0, 100, 9);
  std::stringstream buffer;
  save_zoo(zoo, buffer);
  const std::string text = buffer.str();
  Zoo back = load_zoo(buffer);
  CHECK(back.seed == 9);
  REQUIRE(back.grammars.size() == zoo.grammars.size());
  for (std::size_t i = 0; i < zoo.grammars.size(); ++i) CHECK(back.grammars[i] == zoo.grammars[i]);
  std::stringstream again;
  save_zoo(back, again);
  CHECK(again.str() == text);

  std::stringstream tampered(R"j({"seed": 1, "grammars": [{"rules": "(sigma 1 (lit a))", "mdl": 9.0}]})j");
  CHECK_THROWS_AS(load_zoo(tampered), Error);
}

TEST_CASE("softmax prior") {
  const std::vector<double> mdl{1.0, 2.0, 3.0};
  auto w = softmax_weights(mdl, -1.0);
  const double z = std::exp(-1.0) + std::exp(-2.0) + std::exp(-3.0);
  CHECK(w[0] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(std::exp(-3.0) / z).epsilon(1e-12));
  CHECK_THROWS_AS(softmax_weights(mdl, 0.0), Error);

  Zoo zoo = build_zoo(500, 0, 100, 3);
  std::vector<double> bits;
  double mean = 0;
  for (const auto& g : zoo.grammars) {
    bits.push_back(g.mdl_bits());
    mean += g.mdl_bits() / 500.0;
  }
  // The expectation rises with 1/T: -1, -5, +5, +1 in increasing order.
  double previous = -1;
  for (double t : {-1.0, -5.0, 5.0, 1.0}) {
    const double e = expected_mdl(bits, t);
    CHECK(e > previous);
    previous = e;
  }
  CHECK(expected_mdl(bits, -5.0) < mean);
  CHECK(expected_mdl(bits, 5.0) > mean);
  CHECK(expected_mdl(bits, 1e9) == doctest::Approx(mean).epsilon(1e-6));

  // Sampled means land on the side the exact expectation predicts.
  for (double t : {-5.0, 5.0}) {
    GrammarSampler sampler(zoo, t);
    Rng rng(77);
    double sum = 0;
    for (int i = 0; i < 10000; ++i) sum += sampler.sample(rng).mdl_bits();
    const double empirical = sum / 10000;
    CHECK(empirical == doctest::Approx(expected_mdl(bits, t)).epsilon(0.05));
    CHECK((t < 0 ? empirical < mean : empirical > mean));
  }

  GrammarSampler flat(zoo, -1e9);
  for (double p : flat.probabilities()) CHECK(p == doctest::Approx(1.0 / 500).epsilon(1e-6));
}
