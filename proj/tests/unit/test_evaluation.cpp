#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"

#include "common/error.hpp"
#include "evaluation/evaluate.hpp"
#include "meta_train/maml.hpp"
#include "neural_core/network.hpp"

using namespace mlfw;
using namespace mlfw::eval;
using langs::ContinuationSet;
using langs::LangName;
using langs::LanguageSpec;

namespace {

std::vector<double> dist(std::initializer_list<std::pair<int, double>> mass) {
  std::vector<double> d(10, 0.0);
  for (auto [k, p] : mass) d[static_cast<std::size_t>(k)] = p;
  return d;
}

ContinuationSet set(std::initializer_list<int> ids) {
  std::vector<int> v(ids);
  return ContinuationSet::from_ids(v);
}

}  // namespace

TEST_CASE("metric examples") {
  CHECK(p_val(dist({{3, 1.0}}), set({3, 4})) == 1.0);
  CHECK(p_val(std::vector<double>(10, 0.1), set({3, 4, 5})) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(p_val(std::vector<double>(10, 0.1), set({0, 1, 2, 3, 4, 5, 6, 7, 8, 9})) == doctest::Approx(1.0));

  CHECK(better_than(dist({{3, 0.5}, {4, 0.2}, {7, 0.3}}), set({3, 4})) == 0.5);
  CHECK(better_than(dist({{3, 1.0}}), set({3, 4, 5})) == doctest::Approx(1.0 / 3));
  CHECK(better_than(std::vector<double>(10, 0.1), set({0, 1, 2, 3, 4, 5, 6, 7, 8, 9})) == 1.0);
  CHECK(better_than(dist({{3, 0.5}, {7, 0.5}}), set({3})) == 0.0);

  CHECK(f1(1, 1) == 1.0);
  CHECK(f1(0.7, 0.5) == doctest::Approx(0.7 / 1.2).epsilon(1e-15));
  CHECK(f1(0.4, 0) == 0.0);
  CHECK(f1(0, 0) == 0.0);
  CHECK_THROWS_AS(f1(1.5, 0.2), Error);

  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([] { p_val(std::vector<double>(10, 0.2), set({3})); }) == ErrorCode::BadDistribution);
  CHECK(code([] { better_than(dist({{3, 1.1}, {4, -0.1}}), set({3})); }) == ErrorCode::BadDistribution);
  CHECK(code([] { p_val(std::vector<double>(9, 1.0 / 9), set({3})); }) == ErrorCode::BadDistribution);
  CHECK_NOTHROW(p_val(dist({{3, 1.0 + 5e-7}}), set({3})));
}

TEST_CASE("per-record metric invariants") {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> d(10);
    double z = 0.0;
    for (auto& p : d) z += p = std::pow(rng.uniform01(), 4.0);
    for (auto& p : d) p /= z;
    ContinuationSet v;
    for (int k = 0; k < 10; ++k)
      if (rng.below(3) == 0) v.insert(k);
    if (v.empty()) v.insert(static_cast<int>(rng.below(10)));
    auto m = score(d, v);
    CHECK(m.p_val >= 0.0);
    CHECK(m.p_val <= 1.0 + 1e-12);
    CHECK(m.bt >= 0.0);
    CHECK(m.bt <= 1.0);
    CHECK(m.f1 <= 2 * std::min(m.p_val, m.bt) + 1e-15);
  }
}

TEST_CASE("records for (){()} reproduce the continuation table") {
  auto dyck = LanguageSpec::get(LangName::Dyck);
  auto recs = records_for_string(dyck, dyck.parse_glyphs("(){()}"));
  REQUIRE(recs.size() == 6);
  const std::vector<int> lengths{1, 1, 2, 3, 3, 3};
  // ( = 3, ) = 4, { = 5, } = 6
  const std::vector<ContinuationSet> valid{set({3, 5, 4}), set({3, 5, 1}), set({3, 5, 6}),
                                           set({3, 5, 4}), set({3, 5, 6}), set({3, 5, 1})};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(recs[i].lang == "dyck");
    CHECK(recs[i].prefix.size() == i + 1);
    CHECK(recs[i].length == lengths[i]);
    CHECK(recs[i].valid == valid[i]);
  }
  CHECK_THROWS_AS(records_for_string(dyck, dyck.parse_glyphs("(){(")), Error);

  // Hand-specified distributions, one per row.
  const std::vector<std::vector<double>> dists{
      dist({{3, 0.5}, {4, 0.3}, {0, 0.2}}),   // p .8, bt 2/3, f1 8/11
      std::vector<double>(10, 0.1),           // p .3, bt 0, f1 0
      dist({{6, 1.0}}),                       // p 1, bt 1/3, f1 1/2
      dist({{3, 1.0 / 3}, {4, 1.0 / 3}, {5, 1.0 / 3}}),  // f1 1
      dist({{3, 0.25}, {4, 0.25}, {5, 0.25}, {6, 0.25}}),  // tie: bt 0
      dist({{1, 0.6}, {3, 0.1}, {9, 0.3}}),   // p .7, bt 1/3, f1 14/31
  };
  auto report = evaluate_distributions(recs, dists, 10);
  const double expected = (8.0 / 11 + 0.0 + 0.5 + 1.0 + 0.0 + 14.0 / 31) / 6;
  CHECK(report.within.f1 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(report.within.count == 6);
  CHECK(report.records[2].metrics.p_val == 1.0);
  CHECK(report.records[2].metrics.bt < 1.0);
}

TEST_CASE("evaluation corpora") {
  Rng rng(6);
  auto an = LanguageSpec::get(LangName::An);
  auto corpus = build_eval_corpus(an, rng);
  auto groups = group_strings(corpus);
  CHECK(groups.size() == 400);
  CHECK(corpus.size() == 10 * (40 * 41 / 2));
  for (const auto& g : groups) CHECK(g.end - g.begin == corpus[g.end - 1].prefix.size());

  CorpusOptions small;
  small.max_length = 6;
  small.strings_per_length = 4;
  for (LangName name : LanguageSpec::all_names()) {
    auto spec = LanguageSpec::get(name);
    Rng r(7);
    auto c = build_eval_corpus(spec, r, small);
    for (const auto& rec : c) {
      CHECK_FALSE(rec.valid.empty());
      CHECK(rec.valid == langs::valid_continuations(spec, rec.prefix));
      CHECK(rec.length == langs::prefix_length(spec, rec.prefix));
    }
    for (const auto& g : group_strings(c)) CHECK(c[g.end - 1].valid.contains(langs::kStop));
  }

  CorpusOptions dedup;
  dedup.dedup = true;
  dedup.max_length = 5;
  Rng r(8);
  CHECK(group_strings(build_eval_corpus(an, r, dedup)).size() == 5);

  std::stringstream io;
  write_corpus(io, corpus);
  const auto text = io.str();
  CHECK(text.substr(0, text.find('\n')) == R"({"lang":"an","prefix":[3],"valid":[1,3],"length":1})");
  CHECK(read_corpus(io) == corpus);

  std::stringstream broken(R"({"lang":"an","prefix":[3],"valid":[1,3],"length":1}
{"lang":"an","prefix":[3,3,3],"valid":[1,3],"length":3}
)");
  auto recs = read_corpus(broken);
  CHECK_THROWS_AS(group_strings(recs), Error);
  std::stringstream bad_json("{\"lang\": 3}\n");
  CHECK_THROWS_AS(read_corpus(bad_json), Error);
}

TEST_CASE("model evaluation") {
  nn::ArchDescriptor arch;
  arch.hidden_dim = arch.embed_dim = 8;
  auto zero = nn::zeros<float>(arch);
  CorpusOptions opts;
  opts.max_length = 12;
  opts.strings_per_length = 3;
  std::vector<ContinuationRecord> corpus;
  for (LangName name : {LangName::Anbn, LangName::Dyck, LangName::Ww}) {
    Rng rng(9);
    auto c = build_eval_corpus(LanguageSpec::get(name), rng, opts);
    corpus.insert(corpus.end(), c.begin(), c.end());
  }

  // Zero weights give the uniform distribution.
  auto uniform = evaluate_model(zero, corpus, 10);
  for (const auto& r : uniform.records)
    CHECK(r.metrics.p_val == doctest::Approx(corpus[r.record_id].valid.size() / 10.0).epsilon(1e-12));

  // Oracle distributions score perfectly.
  std::vector<std::vector<double>> oracle;
  for (const auto& rec : corpus) {
    std::vector<double> d(10, 0.0);
    for (int x : rec.valid.ids()) d[static_cast<std::size_t>(x)] = 1.0 / static_cast<double>(rec.valid.size());
    oracle.push_back(d);
  }
  auto perfect = evaluate_distributions(corpus, oracle, 10);
  CHECK(perfect.within.f1 == doctest::Approx(1.0));
  CHECK(perfect.language_mean_f1 == doctest::Approx(1.0));

  auto params = meta::initial_params(arch, 1);
  auto report = evaluate_model(params, corpus, 10);
  CHECK(report.records.size() == corpus.size());
  double weighted = 0.0;
  std::size_t count = 0;
  for (const auto& [name, lang] : report.languages) {
    weighted += lang.within.f1 * static_cast<double>(lang.within.count);
    count += lang.within.count;
  }
  CHECK(count == report.within.count);
  CHECK(report.within.f1 == doctest::Approx(weighted / static_cast<double>(count)).epsilon(1e-12));
  std::size_t within = 0;
  for (const auto& rec : corpus) within += rec.length <= 10;
  CHECK(report.within.count == within);
  CHECK(report.languages.size() == 3);
  CHECK(report.by_length.rbegin()->first == 12);

  // Teacher-forced distributions match a direct forward pass on each prefix.
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, corpus.size() - 1}) {
    auto fp = nn::forward(params, nn::make_batch(std::vector<langs::SymbolString>{corpus[i].prefix}));
    std::vector<double> d(10);
    const auto col = static_cast<Eigen::Index>(corpus[i].prefix.size());
    for (int v = 0; v < 10; ++v) d[static_cast<std::size_t>(v)] = fp.probs(v, col);
    double z = 0.0;
    for (double p : d) z += p;
    for (double& p : d) p /= z;
    auto m = score(d, corpus[i].valid);
    CHECK(m.p_val == doctest::Approx(report.records[i].metrics.p_val).epsilon(1e-5));
  }

  auto rerun = evaluate_model(params, corpus, 10);
  std::ostringstream a, b, agg_a, agg_b;
  write_record_csv(a, report);
  write_record_csv(b, rerun);
  CHECK(a.str() == b.str());
  write_aggregate_csv(agg_a, report, "ck", 10);
  write_aggregate_csv(agg_b, rerun, "ck", 10);
  CHECK(agg_a.str() == agg_b.str());
  CHECK(a.str().substr(0, a.str().find('\n')) == "lang,record_id,length,p_val,bt,f1");
  CHECK(agg_a.str().find("ck,*,10,le10,") != std::string::npos);
  CHECK(agg_a.str().find("ck,*languages,10,le10,") != std::string::npos);
  CHECK(agg_a.str().find("ck,dyck,10,12,") != std::string::npos);
}
