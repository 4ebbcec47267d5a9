#include <algorithm>
#include <set>

#include "doctest.h"

#include "common/error.hpp"
#include "formal_langs/sampling.hpp"
#include "meta_train/maml.hpp"
#include "neural_core/network.hpp"
#include "neural_core/optim.hpp"

using namespace mlfw;
using namespace mlfw::meta;
using langs::LangName;
using langs::LanguageSpec;

namespace {

MetaConfig small_config(nn::CellType cell = nn::CellType::LSTM) {
  MetaConfig cfg;
  cfg.arch.cell = cell;
  cfg.arch.hidden_dim = 8;
  cfg.arch.embed_dim = 8;
  cfg.inner_loops_total = 4;
  cfg.support_batches = 3;
  cfg.support_batch_size = 4;
  cfg.query_batches = 2;
  cfg.query_batch_size = 3;
  cfg.seed = 11;
  return cfg;
}

bool same(const nn::Params& a, const nn::Params& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.arrays[i] != b.arrays[i]) return false;
  return true;
}

std::shared_ptr<const zoo::Zoo> toy_zoo() {
  auto z = std::make_shared<zoo::Zoo>();
  using zoo::Node;
  z->grammars.emplace_back(Node::concat(Node::literal(0), Node::plus(Node::literal(1))), 2);
  z->grammars.emplace_back(Node::repeat(Node::alt(Node::literal(0), Node::literal(2)), 1, 6), 3);
  return z;
}

}  // namespace

TEST_CASE("vocabulary maps permute payload ids only") {
  Rng rng(1);
  std::set<std::vector<int>> seen;
  for (int i = 0; i < 50; ++i) {
    auto m = VocabMap::random(rng);
    CHECK(m.apply(langs::kStart) == langs::kStart);
    CHECK(m.apply(langs::kStop) == langs::kStop);
    CHECK(m.apply(langs::kPad) == langs::kPad);
    std::vector<int> t(m.table().begin(), m.table().end());
    std::vector<int> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    langs::SymbolString s{3, 4, 5, 6, 7, 8, 9};
    CHECK(m.invert(m.apply(s)) == s);
    seen.insert(t);
  }
  CHECK(seen.size() > 40);
}

TEST_CASE("language tasks") {
  Rng rng(2);
  for (LangName name : {LangName::Anbncn, LangName::Dyck, LangName::Ww}) {
    auto spec = LanguageSpec::get(name);
    auto source = TaskSource::language(spec);
    CHECK(source.describe() == std::string(spec.name_str()));
    auto a = make_task(source, rng);
    auto b = make_task(source, rng);
    CHECK(a.support.size() == 200);
    CHECK(a.query.size() == 20);
    CHECK_FALSE(a.grammar.has_value());
    CHECK_FALSE(a.vocab == b.vocab);
    for (const auto& s : a.support) {
      auto canonical = a.vocab.invert(s);
      REQUIRE(langs::membership(spec, canonical));
      const int len = langs::prefix_length(spec, canonical);
      CHECK(len >= 1);
      CHECK(len <= 10);
    }
    for (const auto& s : a.query) {
      auto canonical = a.vocab.invert(s);
      REQUIRE(langs::membership(spec, canonical));
      const int len = langs::prefix_length(spec, canonical);
      CHECK(len >= 11);
      CHECK(len <= 20);
    }
  }
  // A canonical symbol maps to one id throughout a task.
  auto an = make_task(TaskSource::language(LanguageSpec::get(LangName::An)), rng);
  const int a_id = an.vocab.apply(3);
  for (const auto& s : an.support)
    CHECK(std::all_of(s.begin(), s.end(), [&](int x) { return x == a_id; }));
}

TEST_CASE("zoo tasks split by token length") {
  auto z = toy_zoo();
  auto source = TaskSource::grammar_zoo(z, 1.0);
  CHECK(source.describe() == "zoo(T=1)");
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    auto t = make_task(source, rng);
    REQUIRE(t.grammar.has_value());
    const auto& g = z->grammars[*t.grammar];
    std::size_t longest_support = 0, shortest_query = 1000;
    for (const auto& s : t.support) {
      CHECK(zoo::derives(g, t.vocab.invert(s)));
      longest_support = std::max(longest_support, s.size());
    }
    for (const auto& s : t.query) {
      CHECK(zoo::derives(g, t.vocab.invert(s)));
      shortest_query = std::min(shortest_query, s.size());
    }
    CHECK(t.support.size() == 200);
    CHECK(t.query.size() == 20);
    CHECK(shortest_query >= longest_support);
  }
  CHECK_THROWS_AS(TaskSource::grammar_zoo(std::make_shared<zoo::Zoo>(), 1.0), Error);
}

TEST_CASE("inner loop") {
  auto cfg = small_config();
  Rng rng(4);
  auto task = make_task(TaskSource::language(LanguageSpec::get(LangName::Anbn)), rng, cfg.task_shape());
  auto init = initial_params(cfg.arch, 9);

  SUBCASE("zero learning rate leaves init and returns the query gradient") {
    cfg.inner_lr = 0.0;
    auto r = inner_loop(init, task, cfg);
    CHECK(same(r.adapted, init));
    auto g0 = nn::loss_and_gradient(init, nn::make_batch(std::span(task.query).subspan(0, 3)));
    auto g1 = nn::loss_and_gradient(init, nn::make_batch(std::span(task.query).subspan(3, 3)));
    CHECK(r.query_loss == doctest::Approx((g0.loss + g1.loss) / 2).epsilon(1e-12));
    for (std::size_t i = 0; i < init.size(); ++i) {
      nn::Matrix<float> expect = 0.5f * g0.grads.arrays[i] + 0.5f * g1.grads.arrays[i];
      CHECK(r.meta_grad.arrays[i].isApprox(expect, 1e-5f));
    }
  }

  SUBCASE("each support batch is used once, in order") {
    auto manual = init;
    for (int b = 0; b < cfg.support_batches; ++b) {
      auto lg = nn::loss_and_gradient(manual, nn::make_batch(std::span(task.support).subspan(4 * b, 4)));
      nn::clip_global_norm(lg.grads, cfg.clip_norm);
      nn::sgd_step(manual, lg.grads, cfg.inner_lr);
    }
    CHECK(same(inner_loop(init, task, cfg).adapted, manual));
    auto short_task = task;
    short_task.support.pop_back();
    CHECK_THROWS_AS(inner_loop(init, short_task, cfg), Error);
  }

  SUBCASE("non-finite losses abort") {
    cfg.inner_lr = 1e38;
    cfg.clip_norm = 0.0;
    cfg.support_batches = 3;
    try {
      inner_loop(init, task, cfg);
      FAIL("expected NonFiniteLoss");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteLoss);
    }
  }
}

TEST_CASE("adaptation lowers query loss on a memorizable task") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = small_config();
    cfg.arch.hidden_dim = cfg.arch.embed_dim = 16;
    TaskInstance task;
    task.vocab = VocabMap::identity();
    task.support.assign(12, {3, 3, 4, 4});
    task.query.assign(6, {3, 3, 4, 4});
    auto init = initial_params(cfg.arch, seed);
    const double before = nn::loss(init, nn::make_batch(task.query));
    CHECK(inner_loop(init, task, cfg).query_loss < before);
  }
}

TEST_CASE("outer loop") {
  auto source = TaskSource::language(LanguageSpec::get(LangName::Anbn));
  auto cfg = small_config();

  CHECK(meta_train(cfg, source).log.size() == 2);
  cfg.inner_loops_total = 5;
  auto odd = meta_train(cfg, source);
  CHECK(odd.log.size() == 3);
  CHECK(odd.task_losses.size() == 5);

  auto again = meta_train(cfg, source);
  CHECK(same(odd.params, again.params));
  CHECK(odd.task_losses == again.task_losses);
  cfg.seed += 1;
  CHECK_FALSE(same(odd.params, meta_train(cfg, source).params));

  auto gru = small_config(nn::CellType::GRU);
  auto zoo_run = meta_train(gru, TaskSource::grammar_zoo(toy_zoo(), -1.0));
  CHECK(zoo_run.log.size() == 2);
  CHECK(nn::all_finite(zoo_run.params));

  std::vector<int> steps;
  meta_train(small_config(), source, [&](const MetaLogRow& r) { steps.push_back(r.outer_step); });
  CHECK(steps == std::vector<int>{0, 1});

  auto bad = small_config();
  bad.meta_accumulation = 0;
  CHECK_THROWS_AS(meta_train(bad, source), Error);
  bad = small_config();
  bad.inner_lr = 1e38;
  bad.clip_norm = 0.0;
  try {
    meta_train(bad, source);
    FAIL("expected NonFiniteLoss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteLoss);
    CHECK(std::string(e.what()).find("anbn task 0") != std::string::npos);
  }
}

TEST_CASE("task order within an accumulation group does not matter") {
  auto cfg = small_config();
  auto source = TaskSource::language(LanguageSpec::get(LangName::Dyck));
  auto init = initial_params(cfg.arch, 5);
  Rng r1(21), r2(22);
  auto g1 = inner_loop(init, make_task(source, r1, cfg.task_shape()), cfg).meta_grad;
  auto g2 = inner_loop(init, make_task(source, r2, cfg.task_shape()), cfg).meta_grad;
  auto forward_order = nn::zeros_like(init), reverse_order = nn::zeros_like(init);
  nn::axpy(forward_order, 1.0f, g1);
  nn::axpy(forward_order, 1.0f, g2);
  nn::axpy(reverse_order, 1.0f, g2);
  nn::axpy(reverse_order, 1.0f, g1);
  CHECK(same(forward_order, reverse_order));
}

TEST_CASE("without inner steps meta-training is Adam on query batches") {
  auto cfg = small_config();
  cfg.meta_accumulation = 1;
  cfg.support_batches = 0;
  cfg.inner_loops_total = 3;
  auto source = TaskSource::language(LanguageSpec::get(LangName::Anbn));
  auto run = meta_train(cfg, source);

  auto params = initial_params(cfg.arch, cfg.seed);
  auto adam = nn::AdamState<float>::zeros_for(params);
  const Rng streams(derive_seed(cfg.seed, "tasks"));
  for (int k = 0; k < 3; ++k) {
    Rng rng = streams.fork(static_cast<std::uint64_t>(k));
    auto task = make_task(source, rng, cfg.task_shape());
    auto grad = nn::zeros_like(params);
    for (int b = 0; b < cfg.query_batches; ++b) {
      auto lg = nn::loss_and_gradient(params, nn::make_batch(std::span(task.query).subspan(3 * b, 3)));
      nn::axpy(grad, 0.5f, lg.grads);
    }
    nn::clip_global_norm(grad, cfg.clip_norm);
    nn::adam_step(adam, params, grad, cfg.outer_lr);
  }
  CHECK(same(run.params, params));
}

TEST_CASE("meta configuration JSON") {
  auto cfg = small_config(nn::CellType::GRU);
  cfg.outer_lr = 1e-3;
  auto back = meta_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  auto defaults = meta_config_from_json(nlohmann::json::object());
  CHECK(defaults.inner_lr == 1.0);
  CHECK(defaults.outer_lr == 1e-4);
  CHECK(defaults.inner_loops_total == 25000);
  CHECK(defaults.meta_accumulation == 2);
  CHECK(defaults.task_shape().support == 200);
  CHECK(defaults.task_shape().query == 20);
}
