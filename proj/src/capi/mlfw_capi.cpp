#include "mlfw/mlfw.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "common/error.hpp"
#include "downstream/train.hpp"
#include "evaluation/evaluate.hpp"
#include "formal_langs/corpus_io.hpp"
#include "formal_langs/sampling.hpp"
#include "grammar_zoo/zoo.hpp"
#include "meta_train/maml.hpp"
#include "neural_core/network.hpp"
#include "runner/report.hpp"

using namespace mlfw;
using nlohmann::json;
using nlohmann::ordered_json;

struct mlfw_language {
  langs::LanguageSpec spec;
};

struct mlfw_zoo {
  std::shared_ptr<const zoo::Zoo> zoo;
};

struct mlfw_model {
  nn::Checkpoint ckpt;
};

namespace {

thread_local std::string last_error;

mlfw_status to_status(ErrorCode code) { return static_cast<mlfw_status>(static_cast<int>(code)); }

template <typename Fn>
mlfw_status guard(Fn&& fn) {
  try {
    fn();
    return MLFW_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("JSON: ") + e.what();
    return MLFW_FORMAT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MLFW_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MLFW_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return MLFW_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::span<const int> symbols(const int* p, std::size_t n) {
  if (n > 0) need(p, "symbol array");
  return {p, n};
}

void copy_out(const langs::SymbolString& s, int* out, std::size_t cap, std::size_t* out_len) {
  need(out_len, "out_len");
  *out_len = s.size();
  if (cap > 0) need(out, "output array");
  std::copy_n(s.begin(), std::min(cap, s.size()), out);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

json parse_json(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Format, std::string(what) + ": " + e.what());
  }
}

ordered_json metrics_json(const eval::MeanMetrics& m) {
  return {{"records", m.count}, {"mean_f1", m.f1}, {"mean_p_val", m.p_val}, {"mean_bt", m.bt}};
}

}  // namespace

extern "C" {

const char* mlfw_version(void) { return "1.0.0"; }

const char* mlfw_status_name(mlfw_status status) {
  switch (status) {
    case MLFW_OK: return "Ok";
    case MLFW_INTERNAL: return "Internal";
    default:
      if (status >= MLFW_INVALID_ARGUMENT && status <= MLFW_FORMAT)
        return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
      return "Unknown";
  }
}

const char* mlfw_last_error(void) { return last_error.c_str(); }

void mlfw_string_free(char* s) { std::free(s); }

mlfw_status mlfw_language_open(const char* name, int pairs_homogeneous, mlfw_language** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    *out = new mlfw_language{langs::LanguageSpec::parse(name, pairs_homogeneous != 0)};
  });
}

void mlfw_language_free(mlfw_language* lang) { delete lang; }

const char* mlfw_language_names(void) { return "an anbn anbncn kleene wwR ww pairs_n dyck cross_dyck"; }

mlfw_status mlfw_language_membership(const mlfw_language* lang, const int* s, size_t n, int* out_member) {
  return guard([&] {
    need(lang, "lang");
    need(out_member, "out_member");
    *out_member = langs::membership(lang->spec, symbols(s, n)) ? 1 : 0;
  });
}

mlfw_status mlfw_language_continuations(const mlfw_language* lang, const int* prefix, size_t n, uint16_t* out_mask) {
  return guard([&] {
    need(lang, "lang");
    need(out_mask, "out_mask");
    *out_mask = langs::valid_continuations(lang->spec, symbols(prefix, n)).bits();
  });
}

mlfw_status mlfw_language_prefix_length(const mlfw_language* lang, const int* prefix, size_t n, int* out_length) {
  return guard([&] {
    need(lang, "lang");
    need(out_length, "out_length");
    *out_length = langs::prefix_length(lang->spec, symbols(prefix, n));
  });
}

mlfw_status mlfw_language_count(const mlfw_language* lang, int length, char** out_decimal) {
  return guard([&] {
    need(lang, "lang");
    need(out_decimal, "out_decimal");
    *out_decimal = dup(langs::count_strings(lang->spec, length).str());
  });
}

mlfw_status mlfw_language_unrank(const mlfw_language* lang, int length, const char* rank, int* out, size_t cap,
                                 size_t* out_len) {
  return guard([&] {
    need(lang, "lang");
    need(rank, "rank");
    const std::string text(rank);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
      fail(ErrorCode::InvalidArgument, "rank must be a nonnegative decimal integer");
    copy_out(langs::unrank(lang->spec, length, BigInt(text)).symbols, out, cap, out_len);
  });
}

mlfw_status mlfw_language_parse(const mlfw_language* lang, const char* glyphs, int* out, size_t cap,
                                size_t* out_len) {
  return guard([&] {
    need(lang, "lang");
    need(glyphs, "glyphs");
    copy_out(lang->spec.parse_glyphs(glyphs), out, cap, out_len);
  });
}

mlfw_status mlfw_language_render(const mlfw_language* lang, const int* s, size_t n, char** out_text) {
  return guard([&] {
    need(lang, "lang");
    need(out_text, "out_text");
    *out_text = dup(lang->spec.render(symbols(s, n)));
  });
}

mlfw_status mlfw_generate_strings(const mlfw_language* lang, int lo, int hi, int n, uint64_t seed, const char* path,
                                  char** out_text) {
  return guard([&] {
    need(lang, "lang");
    if (n < 0) fail(ErrorCode::InvalidArgument, "n must be nonnegative");
    Rng rng(seed);
    auto strings = langs::sample_by_length_range(lang->spec, lo, hi, n, rng);
    std::ostringstream text;
    langs::write_string_corpus(text, lang->spec, strings);
    if (path && std::strcmp(path, "-") != 0) {
      write_file(path, text.str());
    } else {
      need(out_text, "out_text");
      *out_text = dup(text.str());
    }
  });
}

mlfw_status mlfw_zoo_build(int n, double mdl_lo, double mdl_hi, uint64_t seed, mlfw_zoo** out) {
  return guard([&] {
    need(out, "out");
    *out = new mlfw_zoo{std::make_shared<const zoo::Zoo>(zoo::build_zoo(n, mdl_lo, mdl_hi, seed))};
  });
}

mlfw_status mlfw_zoo_load(const char* path, mlfw_zoo** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, std::string("cannot read ") + path);
    *out = new mlfw_zoo{std::make_shared<const zoo::Zoo>(zoo::load_zoo(in))};
  });
}

mlfw_status mlfw_zoo_save(const mlfw_zoo* z, const char* path) {
  return guard([&] {
    need(z, "zoo");
    need(path, "path");
    std::ostringstream text;
    zoo::save_zoo(*z->zoo, text);
    write_file(path, text.str());
  });
}

void mlfw_zoo_free(mlfw_zoo* z) { delete z; }

mlfw_status mlfw_zoo_size(const mlfw_zoo* z, size_t* out) {
  return guard([&] {
    need(z, "zoo");
    need(out, "out");
    *out = z->zoo->grammars.size();
  });
}

mlfw_status mlfw_zoo_stats_json(const mlfw_zoo* z, char** out_json) {
  return guard([&] {
    need(z, "zoo");
    need(out_json, "out_json");
    const auto s = zoo::zoo_stats(*z->zoo);
    ordered_json j{{"count", s.count},     {"mean_mdl", s.mean_mdl},   {"min_mdl", s.min_mdl},
                   {"max_mdl", s.max_mdl}, {"histogram", s.histogram}, {"seed", z->zoo->seed},
                   {"mdl_lo", z->zoo->mdl_lo}, {"mdl_hi", z->zoo->mdl_hi}};
    *out_json = dup(j.dump());
  });
}

mlfw_status mlfw_zoo_expected_mdl(const mlfw_zoo* z, double temperature, double* out) {
  return guard([&] {
    need(z, "zoo");
    need(out, "out");
    std::vector<double> mdl;
    for (const auto& g : z->zoo->grammars) mdl.push_back(g.mdl_bits());
    *out = zoo::expected_mdl(mdl, temperature);
  });
}

mlfw_status mlfw_zoo_grammar(const mlfw_zoo* z, size_t index, char** out_sexpr, double* out_mdl) {
  return guard([&] {
    need(z, "zoo");
    if (index >= z->zoo->grammars.size()) fail(ErrorCode::InvalidArgument, "grammar index out of range");
    const auto& g = z->zoo->grammars[index];
    if (out_sexpr) *out_sexpr = dup(g.to_sexpr());
    if (out_mdl) *out_mdl = g.mdl_bits();
  });
}

mlfw_status mlfw_model_init(const char* arch_json, uint64_t seed, mlfw_model** out) {
  return guard([&] {
    need(out, "out");
    const auto arch = nn::arch_from_json(parse_json(arch_json, "arch"));
    auto* m = new mlfw_model;
    m->ckpt.params = meta::initial_params(arch, seed);
    m->ckpt.metadata = {{"kind", "init"}, {"seed", seed}};
    *out = m;
  });
}

mlfw_status mlfw_model_load(const char* path, mlfw_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mlfw_model{nn::load_checkpoint(path)};
  });
}

mlfw_status mlfw_model_save(const mlfw_model* model, const char* path) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    nn::save_checkpoint(path, model->ckpt);
  });
}

void mlfw_model_free(mlfw_model* model) { delete model; }

mlfw_status mlfw_model_info_json(const mlfw_model* model, char** out_json) {
  return guard([&] {
    need(model, "model");
    need(out_json, "out_json");
    const auto& p = model->ckpt.params;
    ordered_json arrays = ordered_json::array();
    for (std::size_t i = 0; i < p.size(); ++i)
      arrays.push_back({{"name", p.names[i]}, {"rows", p.arrays[i].rows()}, {"cols", p.arrays[i].cols()}});
    ordered_json j{{"arch", nn::to_json(p.arch)},
                   {"metadata", model->ckpt.metadata},
                   {"hash", nn::checkpoint_hash(model->ckpt)},
                   {"parameters", p.scalar_count()},
                   {"arrays", arrays}};
    *out_json = dup(j.dump());
  });
}

mlfw_status mlfw_model_diff_json(const mlfw_model* a, const mlfw_model* b, char** out_json) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out_json, "out_json");
    const auto& pa = a->ckpt.params;
    const auto& pb = b->ckpt.params;
    nn::check_congruent(pa, pb);
    ordered_json arrays = ordered_json::array();
    double total_sq = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const auto d = (pa.arrays[i] - pb.arrays[i]).cast<double>().eval();
      const double m = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
      total_sq += d.squaredNorm();
      max_abs = std::max(max_abs, m);
      arrays.push_back({{"name", pa.names[i]}, {"max_abs", m}, {"l2", d.norm()}});
    }
    ordered_json j{{"identical", max_abs == 0.0}, {"max_abs", max_abs}, {"l2", std::sqrt(total_sq)},
                   {"arrays", arrays}};
    *out_json = dup(j.dump());
  });
}

mlfw_status mlfw_model_next_token(const mlfw_model* model, const int* prefix, size_t n,
                                  double out_dist[MLFW_VOCAB_SIZE]) {
  return guard([&] {
    need(model, "model");
    need(out_dist, "out_dist");
    const auto s = symbols(prefix, n);
    std::vector<langs::SymbolString> rows{langs::SymbolString(s.begin(), s.end())};
    const auto fp = nn::forward(model->ckpt.params, nn::make_batch(rows), static_cast<int>(n) + 1);
    const auto logits = fp.logits.col(static_cast<Eigen::Index>(n)).cast<double>().eval();
    const double top = logits.maxCoeff();
    double z = 0.0;
    for (int v = 0; v < MLFW_VOCAB_SIZE; ++v) z += out_dist[v] = std::exp(logits(v) - top);
    for (int v = 0; v < MLFW_VOCAB_SIZE; ++v) out_dist[v] /= z;
  });
}

mlfw_status mlfw_meta_train(const char* config_json, const char* source, const mlfw_zoo* z, double temperature,
                            const char* log_path, mlfw_meta_progress progress, void* user, mlfw_model** out) {
  return guard([&] {
    need(source, "source");
    need(out, "out");
    const auto cfg = meta::meta_config_from_json(parse_json(config_json, "meta config"));
    std::optional<meta::TaskSource> task_source;
    if (std::strcmp(source, "zoo") == 0) {
      need(z, "zoo");
      task_source = meta::TaskSource::grammar_zoo(z->zoo, temperature);
    } else {
      task_source = meta::TaskSource::language(langs::LanguageSpec::parse(source));
    }
    meta::MetaProgress cb;
    if (progress)
      cb = [&](const meta::MetaLogRow& r) {
        progress(r.outer_step, r.mean_query_loss, r.grad_norm, r.clipped ? 1 : 0, user);
      };
    auto result = meta::meta_train(cfg, *task_source, cb);
    if (log_path) {
      std::ostringstream log;
      meta::write_meta_log(log, result.log);
      write_file(log_path, log.str());
    }
    auto* m = new mlfw_model;
    m->ckpt.params = std::move(result.params);
    m->ckpt.metadata = {{"kind", "meta"}, {"source", task_source->describe()}, {"meta", meta::to_json(cfg)}};
    *out = m;
  });
}

mlfw_status mlfw_train(const mlfw_model* init, int unmetatrained, const char* lang, int n_strings, uint64_t seed,
                       const char* schedule_json, mlfw_model** out, char** out_manifest_json) {
  return guard([&] {
    need(init, "init");
    need(lang, "lang");
    need(out, "out");
    const auto overrides = parse_json(schedule_json, "schedule");
    downstream::TrainSchedule s;
    const bool standard = n_strings == 1 || n_strings == 10 || n_strings == 100;
    if (standard) {
      s = downstream::TrainSchedule::for_strings(n_strings);
    } else if (overrides.contains("sgd_epochs") && overrides.contains("adam_epochs")) {
      s.n_strings = n_strings;
    } else {
      fail(ErrorCode::InvalidArgument, "n_strings outside {1, 10, 100} needs explicit sgd_epochs and adam_epochs");
    }
    s.sgd_epochs = overrides.value("sgd_epochs", s.sgd_epochs);
    s.adam_epochs = overrides.value("adam_epochs", s.adam_epochs);
    s.batch_size = overrides.value("batch_size", s.batch_size);
    s.sgd_lr = overrides.value("sgd_lr", s.sgd_lr);
    s.adam_lr = overrides.value("adam_lr", s.adam_lr);
    s.length_lo = overrides.value("length_lo", s.length_lo);
    s.length_hi = overrides.value("length_hi", s.length_hi);
    s.clip_norm = overrides.value("clip_norm", s.clip_norm);
    const std::string init_id = unmetatrained ? "unmetatrained" : nn::checkpoint_hash(init->ckpt);
    auto model = downstream::train(init->ckpt.params, init_id, langs::LanguageSpec::parse(lang), s, seed);
    auto manifest = downstream::manifest(model);
    auto* m = new mlfw_model;
    m->ckpt.params = std::move(model.params);
    m->ckpt.metadata = {{"kind", "downstream"}, {"manifest", manifest}};
    if (out_manifest_json) *out_manifest_json = dup(manifest.dump(2));
    *out = m;
  });
}

mlfw_status mlfw_metrics(const double dist[MLFW_VOCAB_SIZE], uint16_t valid_mask, double* out_p_val, double* out_bt,
                         double* out_f1) {
  return guard([&] {
    need(dist, "dist");
    langs::ContinuationSet valid;
    for (int k = 0; k < MLFW_VOCAB_SIZE; ++k)
      if ((valid_mask >> k) & 1u) valid.insert(k);
    if (valid_mask >> MLFW_VOCAB_SIZE) fail(ErrorCode::InvalidArgument, "valid mask has bits beyond the vocabulary");
    const auto m = eval::score(std::span<const double>(dist, MLFW_VOCAB_SIZE), valid);
    if (out_p_val) *out_p_val = m.p_val;
    if (out_bt) *out_bt = m.bt;
    if (out_f1) *out_f1 = m.f1;
  });
}

mlfw_status mlfw_eval_corpus_build(const mlfw_language* lang, uint64_t seed, int max_length, int strings_per_length,
                                   int dedup, const char* path) {
  return guard([&] {
    need(lang, "lang");
    need(path, "path");
    eval::CorpusOptions o;
    o.max_length = max_length;
    o.strings_per_length = strings_per_length;
    o.dedup = dedup != 0;
    Rng rng(seed);
    const auto corpus = eval::build_eval_corpus(lang->spec, rng, o);
    std::ostringstream text;
    eval::write_corpus(text, corpus);
    write_file(path, text.str());
  });
}

mlfw_status mlfw_evaluate(const mlfw_model* model, const char* corpus_path, int max_length, const char* record_csv,
                          const char* aggregate_csv, const char* checkpoint_label, int n_strings,
                          char** out_summary_json) {
  return guard([&] {
    need(model, "model");
    need(corpus_path, "corpus_path");
    std::ifstream in(corpus_path);
    if (!in) fail(ErrorCode::Io, std::string("cannot read ") + corpus_path);
    const auto corpus = eval::read_corpus(in);
    const auto report = eval::evaluate_model(model->ckpt.params, corpus, max_length);
    if (record_csv) {
      std::ostringstream out;
      eval::write_record_csv(out, report);
      write_file(record_csv, out.str());
    }
    const std::string label = checkpoint_label ? checkpoint_label : nn::checkpoint_hash(model->ckpt);
    if (aggregate_csv) {
      std::ostringstream out;
      eval::write_aggregate_csv(out, report, label, n_strings);
      write_file(aggregate_csv, out.str());
    }
    if (out_summary_json) {
      ordered_json langs_j = ordered_json::object();
      for (const auto& [name, l] : report.languages) langs_j[name] = metrics_json(l.within);
      ordered_json by_len = ordered_json::object();
      for (const auto& [len, m] : report.by_length) by_len[std::to_string(len)] = metrics_json(m);
      ordered_json j = metrics_json(report.within);
      j["checkpoint"] = label;
      j["max_length"] = max_length;
      j["language_mean_f1"] = report.language_mean_f1;
      j["languages"] = langs_j;
      j["by_length"] = by_len;
      *out_summary_json = dup(j.dump(2));
    }
  });
}

mlfw_status mlfw_run_grid(const char* config_json, const char* out_dir, char** out_summary_json) {
  return guard([&] {
    need(config_json, "config_json");
    need(out_dir, "out_dir");
    const auto cfg = runner::config_from_json(parse_json(config_json, "experiment config"));
    const auto s = runner::run_grid(cfg, out_dir);
    if (out_summary_json) {
      ordered_json j{{"rows", s.rows.size()},
                     {"failed_cells", s.failed_cells},
                     {"meta_runs", s.meta_runs},
                     {"meta_cache_hits", s.meta_cache_hits},
                     {"warnings", s.warnings}};
      *out_summary_json = dup(j.dump(2));
    }
  });
}

mlfw_status mlfw_report(const char* results_csv, const char* out_dir, char** out_warnings_json) {
  return guard([&] {
    need(results_csv, "results_csv");
    need(out_dir, "out_dir");
    std::ifstream in(results_csv);
    if (!in) fail(ErrorCode::Io, std::string("cannot read ") + results_csv);
    const auto warnings = runner::write_reports(runner::read_results_csv(in), out_dir);
    if (out_warnings_json) *out_warnings_json = dup(ordered_json(warnings).dump());
  });
}

}  // extern "C"
