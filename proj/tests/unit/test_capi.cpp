// Exercises the shared library through its C header only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mlfw/mlfw.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  mlfw_string_free(s);
  return out;
}

fs::path scratch() {
  auto p = fs::temp_directory_path() / "mlfw_capi";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("status reporting") {
  mlfw_language* lang = nullptr;
  CHECK(mlfw_language_open("klingon", 0, &lang) == MLFW_INVALID_ARGUMENT);
  CHECK(lang == nullptr);
  CHECK(std::string(mlfw_last_error()).find("klingon") != std::string::npos);
  CHECK(std::string(mlfw_status_name(MLFW_DEAD_PREFIX)) == "DeadPrefix");
  CHECK(std::string(mlfw_status_name(MLFW_OK)) == "Ok");
  CHECK(mlfw_language_open(nullptr, 0, &lang) == MLFW_INVALID_ARGUMENT);
  mlfw_language_free(nullptr);
  mlfw_model_free(nullptr);
  mlfw_zoo_free(nullptr);
  mlfw_string_free(nullptr);
}

TEST_CASE("languages") {
  mlfw_language* dyck = nullptr;
  REQUIRE(mlfw_language_open("dyck", 0, &dyck) == MLFW_OK);
  int ids[16];
  size_t len = 0;
  REQUIRE(mlfw_language_parse(dyck, "(){()}", ids, 16, &len) == MLFW_OK);
  CHECK(len == 6);
  int member = -1;
  CHECK(mlfw_language_membership(dyck, ids, len, &member) == MLFW_OK);
  CHECK(member == 1);
  uint16_t mask = 0;
  CHECK(mlfw_language_continuations(dyck, ids, 3, &mask) == MLFW_OK);
  CHECK(mask == ((1u << 3) | (1u << 5) | (1u << 6)));
  int plen = 0;
  CHECK(mlfw_language_prefix_length(dyck, ids, 3, &plen) == MLFW_OK);
  CHECK(plen == 2);
  int dead[] = {4};
  CHECK(mlfw_language_continuations(dyck, dead, 1, &mask) == MLFW_DEAD_PREFIX);
  int alien[] = {8};
  CHECK(mlfw_language_membership(dyck, alien, 1, &member) == MLFW_UNKNOWN_SYMBOL);

  char* count = nullptr;
  CHECK(mlfw_language_count(dyck, 2, &count) == MLFW_OK);
  CHECK(take(count) == "8");
  CHECK(mlfw_language_count(dyck, 30, &count) == MLFW_OK);
  CHECK(take(count).size() > 19);  // beyond 64 bits

  CHECK(mlfw_language_unrank(dyck, 2, "0", ids, 16, &len) == MLFW_OK);
  char* text = nullptr;
  CHECK(mlfw_language_render(dyck, ids, len, &text) == MLFW_OK);
  CHECK(take(text) == "(())");
  CHECK(mlfw_language_unrank(dyck, 2, "8", ids, 16, &len) == MLFW_RANK_OUT_OF_RANGE);
  CHECK(mlfw_language_unrank(dyck, 2, "-1", ids, 16, &len) == MLFW_INVALID_ARGUMENT);

  char* jsonl = nullptr;
  CHECK(mlfw_generate_strings(dyck, 1, 3, 4, 7, nullptr, &jsonl) == MLFW_OK);
  const auto corpus = take(jsonl);
  CHECK(std::count(corpus.begin(), corpus.end(), '\n') == 4);
  CHECK(corpus.rfind("{\"lang\":\"dyck\",\"symbols\":[", 0) == 0);
  CHECK(mlfw_generate_strings(dyck, 0, 3, 4, 7, nullptr, &jsonl) == MLFW_INVALID_ARGUMENT);
  mlfw_language_free(dyck);
}

TEST_CASE("zoo, models, training and evaluation") {
  const auto dir = scratch();
  mlfw_zoo* zoo = nullptr;
  REQUIRE(mlfw_zoo_build(20, 0, 100, 3, &zoo) == MLFW_OK);
  size_t n = 0;
  CHECK(mlfw_zoo_size(zoo, &n) == MLFW_OK);
  CHECK(n == 20);
  double lo = 0, hi = 0;
  CHECK(mlfw_zoo_expected_mdl(zoo, -5, &lo) == MLFW_OK);
  CHECK(mlfw_zoo_expected_mdl(zoo, 5, &hi) == MLFW_OK);
  CHECK(lo < hi);
  CHECK(mlfw_zoo_expected_mdl(zoo, 0, &hi) == MLFW_INVALID_ARGUMENT);
  const auto zoo_path = (dir / "zoo.json").string();
  CHECK(mlfw_zoo_save(zoo, zoo_path.c_str()) == MLFW_OK);
  mlfw_zoo* loaded = nullptr;
  CHECK(mlfw_zoo_load(zoo_path.c_str(), &loaded) == MLFW_OK);
  char* sexpr = nullptr;
  double mdl = 0;
  CHECK(mlfw_zoo_grammar(loaded, 0, &sexpr, &mdl) == MLFW_OK);
  CHECK(take(sexpr).rfind("(sigma ", 0) == 0);
  CHECK(mlfw_zoo_build(10, 0, 1, 3, &loaded) == MLFW_BIN_UNFILLABLE);

  const char* arch = R"({"cell":"gru","hidden_dim":8})";
  mlfw_model* a = nullptr;
  mlfw_model* b = nullptr;
  REQUIRE(mlfw_model_init(arch, 1, &a) == MLFW_OK);
  REQUIRE(mlfw_model_init(arch, 1, &b) == MLFW_OK);
  char* diff = nullptr;
  CHECK(mlfw_model_diff_json(a, b, &diff) == MLFW_OK);
  CHECK(take(diff).find("\"identical\":true") != std::string::npos);
  CHECK(mlfw_model_init("{not json", 1, &b) == MLFW_FORMAT);

  double dist[MLFW_VOCAB_SIZE];
  int prefix[] = {3, 4};
  CHECK(mlfw_model_next_token(a, prefix, 2, dist) == MLFW_OK);
  double sum = 0;
  for (double p : dist) sum += p;
  CHECK(std::abs(sum - 1.0) < 1e-12);

  const auto model_path = (dir / "a.mlfw").string();
  CHECK(mlfw_model_save(a, model_path.c_str()) == MLFW_OK);
  mlfw_model* reloaded = nullptr;
  CHECK(mlfw_model_load(model_path.c_str(), &reloaded) == MLFW_OK);
  char* info = nullptr;
  CHECK(mlfw_model_info_json(reloaded, &info) == MLFW_OK);
  CHECK(take(info).find("\"cell\":\"gru\"") != std::string::npos);
  mlfw_model_free(reloaded);
  CHECK(mlfw_model_load((dir / "missing.mlfw").string().c_str(), &reloaded) == MLFW_IO);

  const char* meta_cfg = R"({"arch":{"cell":"gru","hidden_dim":8},"inner_loops_total":4,
    "support_batches":2,"support_batch_size":4,"query_batches":1,"query_batch_size":4})";
  int steps = 0;
  auto progress = [](int, double, double, int, void* user) { ++*static_cast<int*>(user); };
  mlfw_model* meta = nullptr;
  const auto log_path = (dir / "meta.csv").string();
  CHECK(mlfw_meta_train(meta_cfg, "zoo", loaded, -5, log_path.c_str(), progress, &steps, &meta) == MLFW_OK);
  CHECK(steps == 2);
  CHECK(fs::exists(log_path));
  mlfw_model_free(meta);
  CHECK(mlfw_meta_train(meta_cfg, "anbncn", nullptr, 0, nullptr, nullptr, nullptr, &meta) == MLFW_OK);
  CHECK(mlfw_meta_train(meta_cfg, "zoo", nullptr, 1, nullptr, nullptr, nullptr, &b) == MLFW_INVALID_ARGUMENT);

  mlfw_model* trained = nullptr;
  char* manifest = nullptr;
  CHECK(mlfw_train(meta, 0, "anbn", 1, 5, nullptr, &trained, &manifest) == MLFW_OK);
  const auto m = take(manifest);
  CHECK(m.find("\"steps\": 6") != std::string::npos);
  CHECK(m.find("unmetatrained") == std::string::npos);
  CHECK(mlfw_train(meta, 0, "anbn", 7, 5, nullptr, &b, nullptr) == MLFW_INVALID_ARGUMENT);
  CHECK(mlfw_train(meta, 0, "anbn", 7, 5, R"({"sgd_epochs":1,"adam_epochs":1})", &b, nullptr) == MLFW_OK);
  mlfw_model_free(b);

  mlfw_language* anbn = nullptr;
  REQUIRE(mlfw_language_open("anbn", 0, &anbn) == MLFW_OK);
  const auto corpus = (dir / "corpus.jsonl").string();
  CHECK(mlfw_eval_corpus_build(anbn, 9, 6, 2, 0, corpus.c_str()) == MLFW_OK);
  char* summary = nullptr;
  const auto records = (dir / "records.csv").string();
  const auto aggregate = (dir / "aggregate.csv").string();
  CHECK(mlfw_evaluate(trained, corpus.c_str(), 10, records.c_str(), aggregate.c_str(), "ck", 1, &summary) ==
        MLFW_OK);
  CHECK(take(summary).find("\"mean_f1\"") != std::string::npos);
  CHECK(fs::exists(records));
  CHECK(fs::exists(aggregate));

  double p = 0, bt = 0, f1 = 0;
  double degenerate[MLFW_VOCAB_SIZE] = {0, 0, 0, 1, 0, 0, 0, 0, 0, 0};
  CHECK(mlfw_metrics(degenerate, (1u << 3) | (1u << 4) | (1u << 1), &p, &bt, &f1) == MLFW_OK);
  CHECK(p == 1.0);
  CHECK(bt == doctest::Approx(1.0 / 3));
  CHECK(f1 == doctest::Approx(0.5));
  double bad[MLFW_VOCAB_SIZE] = {0.5};
  CHECK(mlfw_metrics(bad, 1u << 3, &p, &bt, &f1) == MLFW_BAD_DISTRIBUTION);

  const std::string grid = R"({"meta_sources":["none"],"archs":["lstm"],"hidden_dim":8,"targets":["an"],
    "n_strings":[1],"seeds":[0],"eval":{"corpus_max_length":4,"strings_per_length":1}})";
  CHECK(mlfw_run_grid(grid.c_str(), (dir / "grid").string().c_str(), &summary) == MLFW_OK);
  CHECK(take(summary).find("\"failed_cells\": 0") != std::string::npos);
  CHECK(mlfw_report((dir / "grid" / "results.csv").string().c_str(), (dir / "report").string().c_str(), &summary) ==
        MLFW_OK);
  take(summary);
  CHECK(fs::exists(dir / "report" / "aggregates.csv"));
  CHECK(mlfw_run_grid("{}", (dir / "bad").string().c_str(), nullptr) == MLFW_INVALID_ARGUMENT);

  mlfw_language_free(anbn);
  mlfw_model_free(trained);
  mlfw_model_free(meta);
  mlfw_model_free(a);
  mlfw_zoo_free(loaded);
  mlfw_zoo_free(zoo);
  fs::remove_all(dir);
}
