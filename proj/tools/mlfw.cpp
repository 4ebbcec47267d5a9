// Command-line front end; talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlfw/mlfw.h"

namespace {

struct Failure {
  mlfw_status status;
};

void check(mlfw_status s) {
  if (s != MLFW_OK) throw Failure{s};
}

// Owns a char* returned by the library.
struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { mlfw_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Language = Handle<mlfw_language, mlfw_language_free>;
using Zoo = Handle<mlfw_zoo, mlfw_zoo_free>;
using Model = Handle<mlfw_model, mlfw_model_free>;

std::string arch_json(const std::string& cell, int layers, int hidden, int embed) {
  nlohmann::ordered_json j{{"cell", cell}, {"layers", layers}, {"hidden_dim", hidden},
                           {"embed_dim", embed > 0 ? embed : hidden}};
  return j.dump();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Failure{MLFW_IO};
  }
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    throw Failure{MLFW_IO};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal-language meta-learning workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mlfw_version()));

  // gen
  std::string gen_lang, gen_out;
  int gen_lo = 1, gen_hi = 10, gen_n = 200;
  std::uint64_t gen_seed = 0;
  bool gen_homog = false;
  auto* gen = app.add_subcommand("gen", "Sample language strings as JSONL");
  gen->add_option("--lang", gen_lang, "Language name")->required();
  gen->add_option("--lo", gen_lo, "Shortest language length");
  gen->add_option("--hi", gen_hi, "Longest language length");
  gen->add_option("--n", gen_n, "Number of strings");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");
  gen->add_flag("--homogeneous", gen_homog, "pairs_n uses a single bracket kind per string");

  // lang: inspect a prefix
  std::string q_lang, q_text;
  bool q_homog = false;
  int q_count = 0;
  auto* query = app.add_subcommand("lang", "Membership, continuations and length of a glyph string");
  query->add_option("--lang", q_lang, "Language name")->required();
  query->add_option("text", q_text, "Glyph string, e.g. \"(){\"");
  query->add_option("--count", q_count, "Also print the number of members of this language length");
  query->add_flag("--homogeneous", q_homog, "pairs_n uses a single bracket kind per string");

  // corpus
  std::string c_lang, c_out;
  std::uint64_t c_seed = 0;
  int c_max = 40, c_per = 10;
  bool c_dedup = false, c_homog = false;
  auto* corpus = app.add_subcommand("corpus", "Build a continuation evaluation corpus");
  corpus->add_option("--lang", c_lang, "Language name")->required();
  corpus->add_option("--seed", c_seed, "Seed");
  corpus->add_option("--max-length", c_max, "Longest language length");
  corpus->add_option("--per-length", c_per, "Strings drawn per length");
  corpus->add_flag("--dedup", c_dedup, "Drop repeated strings");
  corpus->add_flag("--homogeneous", c_homog, "pairs_n uses a single bracket kind per string");
  corpus->add_option("--out", c_out, "Output JSONL")->required();

  // zoo build / stats
  auto* zoo = app.add_subcommand("zoo", "Grammar zoo");
  zoo->require_subcommand(1);
  int z_n = 5000;
  double z_lo = 0.0, z_hi = 100.0;
  std::uint64_t z_seed = 0;
  std::string z_out, z_in;
  std::vector<double> z_temps;
  auto* zoo_build = zoo->add_subcommand("build", "Build an MDL-graded zoo");
  zoo_build->add_option("--n", z_n, "Number of grammars");
  zoo_build->add_option("--seed", z_seed, "Seed");
  zoo_build->add_option("--mdl-lo", z_lo, "Lower MDL bound (bits)");
  zoo_build->add_option("--mdl-hi", z_hi, "Upper MDL bound (bits)");
  zoo_build->add_option("--out", z_out, "Output JSON")->required();
  auto* zoo_stats = zoo->add_subcommand("stats", "Summarize a zoo");
  zoo_stats->add_option("zoo", z_in, "Zoo JSON")->required();
  zoo_stats->add_option("--temperature", z_temps, "Report expected MDL at these temperatures");

  // model init / inspect / diff
  auto* model = app.add_subcommand("model", "Model checkpoints");
  model->require_subcommand(1);
  std::string m_cell = "lstm", m_out, m_a, m_b;
  int m_layers = 2, m_hidden = 64, m_embed = 0;
  std::uint64_t m_seed = 0;
  auto* model_init = model->add_subcommand("init", "Write a freshly initialized model");
  model_init->add_option("--arch", m_cell, "lstm or gru");
  model_init->add_option("--layers", m_layers, "Recurrent layers");
  model_init->add_option("--hidden", m_hidden, "Hidden size");
  model_init->add_option("--embed", m_embed, "Embedding size (default: hidden)");
  model_init->add_option("--seed", m_seed, "Seed");
  model_init->add_option("--out", m_out, "Checkpoint path")->required();
  auto* model_inspect = model->add_subcommand("inspect", "Print architecture, metadata and arrays");
  model_inspect->add_option("ckpt", m_a, "Checkpoint")->required();
  auto* model_diff = model->add_subcommand("diff", "Compare two checkpoints array by array");
  model_diff->add_option("a", m_a, "First checkpoint")->required();
  model_diff->add_option("b", m_b, "Second checkpoint")->required();

  // meta-train
  std::string mt_source, mt_cell = "lstm", mt_out, mt_zoo, mt_log, mt_config;
  double mt_temp = 1.0, mt_outer_lr = 1e-4, mt_inner_lr = 1.0;
  int mt_hidden = 64, mt_layers = 2, mt_tasks = 2000, mt_accum = 2;
  std::uint64_t mt_seed = 0;
  bool mt_quiet = false;
  auto* meta = app.add_subcommand("meta-train", "First-order MAML meta-training");
  meta->add_option("--source", mt_source, "Language name or 'zoo'")->required();
  meta->add_option("--zoo", mt_zoo, "Zoo JSON (for --source zoo)");
  meta->add_option("--temperature", mt_temp, "Zoo sampling temperature");
  meta->add_option("--arch", mt_cell, "lstm or gru");
  meta->add_option("--hidden", mt_hidden, "Hidden and embedding size");
  meta->add_option("--layers", mt_layers, "Recurrent layers");
  meta->add_option("--tasks", mt_tasks, "Inner loops (tasks) in total");
  meta->add_option("--accumulation", mt_accum, "Tasks per outer step");
  meta->add_option("--outer-lr", mt_outer_lr, "Adam learning rate");
  meta->add_option("--inner-lr", mt_inner_lr, "Inner SGD learning rate");
  meta->add_option("--config", mt_config, "Meta config JSON (overrides the flags above)");
  meta->add_option("--seed", mt_seed, "Seed");
  meta->add_option("--log", mt_log, "CSV log path (default: <out>.log.csv)");
  meta->add_option("--out", mt_out, "Checkpoint path")->required();
  meta->add_flag("--quiet", mt_quiet, "No progress output");

  // train
  std::string tr_init, tr_lang, tr_out, tr_manifest, tr_cell = "lstm", tr_schedule;
  int tr_n = 10, tr_hidden = 64, tr_layers = 2;
  std::uint64_t tr_seed = 0;
  auto* train = app.add_subcommand("train", "Downstream training on a target language");
  train->add_option("--init", tr_init, "Initial checkpoint, or 'fresh'")->required();
  train->add_option("--lang", tr_lang, "Target language")->required();
  train->add_option("--n", tr_n, "Training strings (1, 10 or 100)");
  train->add_option("--seed", tr_seed, "Seed (also seeds a fresh initialization)");
  train->add_option("--arch", tr_cell, "Architecture for --init fresh");
  train->add_option("--hidden", tr_hidden, "Hidden size for --init fresh");
  train->add_option("--layers", tr_layers, "Layers for --init fresh");
  train->add_option("--schedule", tr_schedule, "Schedule override JSON");
  train->add_option("--manifest", tr_manifest, "Manifest path (default: <out>.manifest.json)");
  train->add_option("--out", tr_out, "Checkpoint path")->required();

  // eval
  std::string ev_model, ev_corpus, ev_records, ev_aggregate, ev_label;
  int ev_max = 10, ev_n = 0;
  auto* ev = app.add_subcommand("eval", "Score a model on a continuation corpus");
  ev->add_option("--model", ev_model, "Checkpoint")->required();
  ev->add_option("--corpus", ev_corpus, "Corpus JSONL")->required();
  ev->add_option("--max-length", ev_max, "Length cutoff for the headline mean");
  ev->add_option("--records", ev_records, "Per-record CSV output");
  ev->add_option("--aggregate", ev_aggregate, "Aggregate CSV output");
  ev->add_option("--label", ev_label, "Checkpoint label for the aggregate CSV (default: hash)");
  ev->add_option("--n-strings", ev_n, "Training size recorded in the aggregate CSV");

  // run / report
  std::string run_config, run_out;
  auto* run = app.add_subcommand("run", "Run an experiment grid");
  run->add_option("--config", run_config, "Experiment JSON")->required();
  run->add_option("--out", run_out, "Output directory")->required();
  std::string rep_results, rep_out;
  auto* report = app.add_subcommand("report", "Rebuild aggregate tables from results.csv");
  report->add_option("--results", rep_results, "results.csv")->required();
  report->add_option("--out", rep_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Language lang;
      check(mlfw_language_open(gen_lang.c_str(), gen_homog, &lang.p));
      OwnedString text;
      const bool to_stdout = gen_out.empty() || gen_out == "-";
      check(mlfw_generate_strings(lang.p, gen_lo, gen_hi, gen_n, gen_seed, to_stdout ? nullptr : gen_out.c_str(),
                                  &text.p));
      if (to_stdout) std::cout << text.str();
    } else if (*query) {
      Language lang;
      check(mlfw_language_open(q_lang.c_str(), q_homog, &lang.p));
      std::vector<int> ids(q_text.size() + 1);
      std::size_t len = 0;
      check(mlfw_language_parse(lang.p, q_text.c_str(), ids.data(), ids.size(), &len));
      int member = 0;
      check(mlfw_language_membership(lang.p, ids.data(), len, &member));
      std::cout << "member: " << (member ? "yes" : "no") << "\n";
      std::uint16_t mask = 0;
      if (mlfw_language_continuations(lang.p, ids.data(), len, &mask) == MLFW_OK) {
        int plen = 0;
        check(mlfw_language_prefix_length(lang.p, ids.data(), len, &plen));
        std::cout << "length: " << plen << "\ncontinuations:";
        for (int k = 0; k < MLFW_VOCAB_SIZE; ++k) {
          if (!((mask >> k) & 1u)) continue;
          OwnedString g;
          check(mlfw_language_render(lang.p, &k, 1, &g.p));
          std::cout << ' ' << g.str();
        }
        std::cout << "\n";
      } else {
        std::cout << "dead prefix: " << mlfw_last_error() << "\n";
      }
      if (q_count > 0) {
        OwnedString count;
        check(mlfw_language_count(lang.p, q_count, &count.p));
        std::cout << "members of length " << q_count << ": " << count.str() << "\n";
      }
    } else if (*corpus) {
      Language lang;
      check(mlfw_language_open(c_lang.c_str(), c_homog, &lang.p));
      check(mlfw_eval_corpus_build(lang.p, c_seed, c_max, c_per, c_dedup, c_out.c_str()));
    } else if (*zoo_build) {
      Zoo z;
      check(mlfw_zoo_build(z_n, z_lo, z_hi, z_seed, &z.p));
      check(mlfw_zoo_save(z.p, z_out.c_str()));
    } else if (*zoo_stats) {
      Zoo z;
      check(mlfw_zoo_load(z_in.c_str(), &z.p));
      OwnedString stats;
      check(mlfw_zoo_stats_json(z.p, &stats.p));
      auto j = nlohmann::ordered_json::parse(stats.str());
      for (double t : z_temps) {
        double e = 0.0;
        check(mlfw_zoo_expected_mdl(z.p, t, &e));
        std::ostringstream key;
        key << t;
        j["expected_mdl"][key.str()] = e;
      }
      std::cout << j.dump(2) << "\n";
    } else if (*model_init) {
      Model m;
      check(mlfw_model_init(arch_json(m_cell, m_layers, m_hidden, m_embed).c_str(), m_seed, &m.p));
      check(mlfw_model_save(m.p, m_out.c_str()));
    } else if (*model_inspect) {
      Model m;
      check(mlfw_model_load(m_a.c_str(), &m.p));
      OwnedString info;
      check(mlfw_model_info_json(m.p, &info.p));
      std::cout << nlohmann::ordered_json::parse(info.str()).dump(2) << "\n";
    } else if (*model_diff) {
      Model a, b;
      check(mlfw_model_load(m_a.c_str(), &a.p));
      check(mlfw_model_load(m_b.c_str(), &b.p));
      OwnedString diff;
      check(mlfw_model_diff_json(a.p, b.p, &diff.p));
      std::cout << nlohmann::ordered_json::parse(diff.str()).dump(2) << "\n";
    } else if (*meta) {
      nlohmann::json cfg;
      if (!mt_config.empty()) cfg = nlohmann::json::parse(read_text(mt_config));
      if (!cfg.contains("arch")) cfg["arch"] = nlohmann::json::parse(arch_json(mt_cell, mt_layers, mt_hidden, 0));
      if (!cfg.contains("inner_loops_total")) cfg["inner_loops_total"] = mt_tasks;
      if (!cfg.contains("meta_accumulation")) cfg["meta_accumulation"] = mt_accum;
      if (!cfg.contains("outer_lr")) cfg["outer_lr"] = mt_outer_lr;
      if (!cfg.contains("inner_lr")) cfg["inner_lr"] = mt_inner_lr;
      if (!cfg.contains("seed")) cfg["seed"] = mt_seed;
      Zoo z;
      if (mt_source == "zoo") {
        if (mt_zoo.empty()) {
          std::cerr << "error: --source zoo needs --zoo\n";
          return 2;
        }
        check(mlfw_zoo_load(mt_zoo.c_str(), &z.p));
      }
      const std::string log = mt_log.empty() ? mt_out + ".log.csv" : mt_log;
      auto progress = [](int step, double loss, double norm, int clipped, void*) {
        if (step % 50 == 0) std::fprintf(stderr, "step %6d  query loss %.4f  grad norm %.4f%s\n", step, loss, norm,
                                         clipped ? "  (clipped)" : "");
      };
      Model m;
      check(mlfw_meta_train(cfg.dump().c_str(), mt_source.c_str(), z.p, mt_temp, log.c_str(),
                            mt_quiet ? nullptr : +progress, nullptr, &m.p));
      check(mlfw_model_save(m.p, mt_out.c_str()));
    } else if (*train) {
      Model init;
      const bool fresh = tr_init == "fresh";
      if (fresh)
        check(mlfw_model_init(arch_json(tr_cell, tr_layers, tr_hidden, 0).c_str(), tr_seed, &init.p));
      else
        check(mlfw_model_load(tr_init.c_str(), &init.p));
      Model out;
      OwnedString manifest;
      check(mlfw_train(init.p, fresh, tr_lang.c_str(), tr_n, tr_seed,
                       tr_schedule.empty() ? nullptr : tr_schedule.c_str(), &out.p, &manifest.p));
      check(mlfw_model_save(out.p, tr_out.c_str()));
      write_text(tr_manifest.empty() ? tr_out + ".manifest.json" : tr_manifest, manifest.str() + "\n");
    } else if (*ev) {
      Model m;
      check(mlfw_model_load(ev_model.c_str(), &m.p));
      OwnedString summary;
      check(mlfw_evaluate(m.p, ev_corpus.c_str(), ev_max, ev_records.empty() ? nullptr : ev_records.c_str(),
                          ev_aggregate.empty() ? nullptr : ev_aggregate.c_str(),
                          ev_label.empty() ? nullptr : ev_label.c_str(), ev_n, &summary.p));
      std::cout << summary.str() << "\n";
    } else if (*run) {
      OwnedString summary;
      check(mlfw_run_grid(read_text(run_config).c_str(), run_out.c_str(), &summary.p));
      std::cout << summary.str() << "\n";
    } else if (*report) {
      OwnedString warnings;
      check(mlfw_report(rep_results.c_str(), rep_out.c_str(), &warnings.p));
      for (const auto& w : nlohmann::json::parse(warnings.str())) std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << mlfw_status_name(f.status) << "): " << mlfw_last_error() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
