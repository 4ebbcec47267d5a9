#include "runner/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "common/error.hpp"
#include "evaluation/evaluate.hpp"
#include "grammar_zoo/zoo.hpp"
#include "runner/report.hpp"

namespace fs = std::filesystem;

namespace mlfw::runner {

const char* to_string(SourceClass c) {
  switch (c) {
    case SourceClass::Unmetatrained: return "unmetatrained";
    case SourceClass::Regular: return "regular";
    case SourceClass::ContextFree: return "context-free";
    case SourceClass::ContextSensitive: return "context-sensitive";
    case SourceClass::ZooSimple: return "zoo-simple";
    case SourceClass::ZooComplex: return "zoo-complex";
  }
  return "?";
}

MetaSourceSpec MetaSourceSpec::parse(const std::string& text) {
  MetaSourceSpec s;
  if (text == "none" || text == "unmetatrained") return s;
  if (text.rfind("zoo:", 0) == 0) {
    s.kind = Kind::Zoo;
    std::size_t used = 0;
    try {
      s.temperature = std::stod(text.substr(4), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 4 || s.temperature == 0.0)
      fail(ErrorCode::InvalidArgument, "bad zoo source '" + text + "': expected zoo:<nonzero temperature>");
    return s;
  }
  s.kind = Kind::Language;
  s.language = langs::LanguageSpec::parse(text).name_str();
  return s;
}

std::string MetaSourceSpec::label() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Language: return language;
    case Kind::Zoo: {
      std::ostringstream os;
      os << "zoo:" << temperature;
      return os.str();
    }
  }
  return "?";
}

SourceClass MetaSourceSpec::source_class() const {
  switch (kind) {
    case Kind::None: return SourceClass::Unmetatrained;
    case Kind::Zoo: return temperature < 0 ? SourceClass::ZooSimple : SourceClass::ZooComplex;
    case Kind::Language:
      switch (langs::LanguageSpec::parse(language).level()) {
        case langs::ChomskyLevel::Regular: return SourceClass::Regular;
        case langs::ChomskyLevel::ContextFree: return SourceClass::ContextFree;
        case langs::ChomskyLevel::ContextSensitive: return SourceClass::ContextSensitive;
      }
  }
  return SourceClass::Unmetatrained;
}

void ExperimentConfig::validate() const {
  if (meta_sources.empty() || archs.empty() || targets.empty() || n_strings.empty() || seeds.empty())
    fail(ErrorCode::InvalidArgument, "experiment grid has an empty axis");
  for (const auto& a : archs) a.validate();
  for (const auto& t : targets) langs::LanguageSpec::parse(t);
  for (int n : n_strings)
    if (n < 1) fail(ErrorCode::InvalidArgument, "n_strings entries must be positive");
  if (max_length < 1 || threads < 1 || train_length_lo < 1 || train_length_hi < train_length_lo)
    fail(ErrorCode::InvalidArgument, "invalid experiment settings");
  auto probe = meta;
  probe.arch = archs.front();
  probe.validate();
}

namespace {

nn::ArchDescriptor desk_arch(nn::CellType cell, int hidden) {
  nn::ArchDescriptor a;
  a.cell = cell;
  a.hidden_dim = a.embed_dim = hidden;
  return a;
}

template <typename T>
std::vector<T> list_of(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::InvalidArgument, std::string("experiment config needs \"") + key + "\"");
  return j.at(key).get<std::vector<T>>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    for (const auto& s : list_of<std::string>(j, "meta_sources")) c.meta_sources.push_back(MetaSourceSpec::parse(s));
    const int hidden = j.value("hidden_dim", 64);
    for (const auto& a : j.at("archs")) {
      if (a.is_string())
        c.archs.push_back(desk_arch(nn::parse_cell(a.get<std::string>()), hidden));
      else
        c.archs.push_back(nn::arch_from_json(a));
    }
    c.targets = list_of<std::string>(j, "targets");
    for (auto& t : c.targets) t = langs::LanguageSpec::parse(t).name_str();
    c.n_strings = list_of<int>(j, "n_strings");
    c.seeds = list_of<std::uint64_t>(j, "seeds");
    c.pairs_homogeneous = j.value("pairs_homogeneous", false);
    auto meta_json = j.value("meta", nlohmann::json::object());
    if (!meta_json.contains("inner_loops_total")) meta_json["inner_loops_total"] = j.value("tasks", 2000);
    c.meta = meta::meta_config_from_json(meta_json);
    if (j.contains("zoo")) {
      const auto& z = j.at("zoo");
      c.zoo.path = z.value("path", std::string());
      c.zoo.size = z.value("size", c.zoo.size);
      c.zoo.mdl_lo = z.value("mdl_lo", c.zoo.mdl_lo);
      c.zoo.mdl_hi = z.value("mdl_hi", c.zoo.mdl_hi);
      c.zoo.seed = z.value("seed", c.zoo.seed);
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      c.max_length = e.value("max_length", c.max_length);
      c.corpus.max_length = e.value("corpus_max_length", c.corpus.max_length);
      c.corpus.strings_per_length = e.value("strings_per_length", c.corpus.strings_per_length);
      c.corpus.dedup = e.value("dedup", c.corpus.dedup);
    }
    if (j.contains("downstream")) {
      const auto& d = j.at("downstream");
      c.train_length_lo = d.value("length_lo", c.train_length_lo);
      c.train_length_hi = d.value("length_hi", c.train_length_hi);
      c.train_clip_norm = d.value("clip_norm", c.train_clip_norm);
    }
    c.threads = j.value("threads", 1);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["master_seed"] = c.master_seed;
  j["meta_sources"] = nlohmann::ordered_json::array();
  for (const auto& s : c.meta_sources) j["meta_sources"].push_back(s.label());
  j["archs"] = nlohmann::ordered_json::array();
  for (const auto& a : c.archs) j["archs"].push_back(nn::to_json(a));
  j["targets"] = c.targets;
  j["n_strings"] = c.n_strings;
  j["seeds"] = c.seeds;
  j["pairs_homogeneous"] = c.pairs_homogeneous;
  auto meta = meta::to_json(c.meta);
  meta.erase("arch");
  meta.erase("seed");
  j["meta"] = meta;
  j["zoo"] = {{"path", c.zoo.path}, {"size", c.zoo.size}, {"mdl_lo", c.zoo.mdl_lo}, {"mdl_hi", c.zoo.mdl_hi},
              {"seed", c.zoo.seed}};
  j["eval"] = {{"max_length", c.max_length},
               {"corpus_max_length", c.corpus.max_length},
               {"strings_per_length", c.corpus.strings_per_length},
               {"dedup", c.corpus.dedup}};
  j["downstream"] = {{"length_lo", c.train_length_lo}, {"length_hi", c.train_length_hi},
                     {"clip_norm", c.train_clip_norm}};
  j["threads"] = c.threads;
  return j;
}

std::string arch_label(const nn::ArchDescriptor& a) {
  std::string s = nn::to_string(a.cell);
  s += "-h" + std::to_string(a.hidden_dim) + "-l" + std::to_string(a.layers);
  if (a.embed_dim != a.hidden_dim) s += "-e" + std::to_string(a.embed_dim);
  return s;
}

std::uint64_t model_seed(const ExperimentConfig& cfg, const nn::ArchDescriptor& arch, std::uint64_t seed) {
  return derive_seed(cfg.master_seed, "model/" + nn::to_json(arch).dump() + "/" + std::to_string(seed));
}

std::uint64_t train_seed(const ExperimentConfig& cfg, const std::string& target, int n, std::uint64_t seed) {
  return derive_seed(cfg.master_seed, "train/" + target + "/" + std::to_string(n) + "/" + std::to_string(seed));
}

std::uint64_t corpus_seed(const ExperimentConfig& cfg, const std::string& target) {
  return derive_seed(cfg.master_seed, "corpus/" + target);
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (threads <= 1 || count <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < std::min<int>(threads, static_cast<int>(count)); ++t) pool.emplace_back(worker);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

struct MetaJob {
  MetaSourceSpec source;
  nn::ArchDescriptor arch;
  std::uint64_t seed = 0;
  meta::MetaConfig cfg;
  std::string key;
  std::string error;
  nn::Params params;
  std::string params_hash;
};

std::string meta_key(const meta::MetaConfig& cfg, const MetaSourceSpec& source, const std::string& zoo_hash) {
  nlohmann::ordered_json j = meta::to_json(cfg);
  j["source"] = source.label();
  if (source.kind == MetaSourceSpec::Kind::Zoo) j["zoo"] = zoo_hash;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return hex;
}

std::string cell_name(const ResultRow& r) {
  std::string s = r.meta_source + "__" + r.arch + "__" + r.target + "__n" + std::to_string(r.n_strings) + "__s" +
                  std::to_string(r.seed);
  for (char& ch : s)
    if (ch == ':' || ch == '/') ch = '_';
  return s;
}

}  // namespace

GridSummary run_grid(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const fs::path root(out_dir);
  for (const char* sub : {"checkpoints", "manifests", "corpora"}) fs::create_directories(root / sub);
  write_text(root / "config.json", to_json(cfg).dump(2) + "\n");

  GridSummary summary;
  std::shared_ptr<const zoo::Zoo> zoo_ptr;
  std::string zoo_hash;
  for (const auto& s : cfg.meta_sources) {
    if (s.kind != MetaSourceSpec::Kind::Zoo || zoo_ptr) continue;
    zoo::Zoo z;
    if (!cfg.zoo.path.empty()) {
      std::ifstream in(cfg.zoo.path);
      if (!in) fail(ErrorCode::Io, "cannot read zoo " + cfg.zoo.path);
      z = zoo::load_zoo(in);
    } else {
      z = zoo::build_zoo(cfg.zoo.size, cfg.zoo.mdl_lo, cfg.zoo.mdl_hi, cfg.zoo.seed);
    }
    std::ostringstream bytes;
    zoo::save_zoo(z, bytes);
    zoo_hash = std::to_string(fnv1a64(bytes.str()));
    zoo_ptr = std::make_shared<const zoo::Zoo>(std::move(z));
  }

  // Meta-training jobs, one per (source, arch, seed), shared by all targets.
  std::vector<MetaJob> jobs;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> job_index;
  for (std::size_t si = 0; si < cfg.meta_sources.size(); ++si) {
    if (cfg.meta_sources[si].kind == MetaSourceSpec::Kind::None) continue;
    for (std::size_t ai = 0; ai < cfg.archs.size(); ++ai)
      for (std::size_t ki = 0; ki < cfg.seeds.size(); ++ki) {
        MetaJob job;
        job.source = cfg.meta_sources[si];
        job.arch = cfg.archs[ai];
        job.seed = cfg.seeds[ki];
        job.cfg = cfg.meta;
        job.cfg.arch = job.arch;
        job.cfg.seed = model_seed(cfg, job.arch, job.seed);
        job.key = meta_key(job.cfg, job.source, zoo_hash);
        job_index[{si, ai, ki}] = jobs.size();
        jobs.push_back(std::move(job));
      }
  }
  std::atomic<int> runs{0}, hits{0};
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    auto& job = jobs[i];
    const auto ckpt_path = root / "checkpoints" / (job.key + ".mlfw");
    try {
      if (fs::exists(ckpt_path)) {
        auto ck = nn::load_checkpoint(ckpt_path.string());
        if (ck.metadata.value("key", std::string()) == job.key && ck.params.arch == job.arch) {
          job.params = std::move(ck.params);
          job.params_hash = nn::checkpoint_hash(nn::Checkpoint{job.params, {}});
          ++hits;
          return;
        }
      }
      auto source = job.source.kind == MetaSourceSpec::Kind::Zoo
                        ? meta::TaskSource::grammar_zoo(zoo_ptr, job.source.temperature)
                        : meta::TaskSource::language(langs::LanguageSpec::parse(job.source.language, cfg.pairs_homogeneous));
      auto result = meta::meta_train(job.cfg, source);
      nn::Checkpoint ck;
      ck.params = result.params;
      ck.metadata = {{"key", job.key}, {"source", job.source.label()}, {"meta", meta::to_json(job.cfg)}};
      nn::save_checkpoint(ckpt_path.string(), ck);
      std::ostringstream log;
      meta::write_meta_log(log, result.log);
      write_text(root / "checkpoints" / (job.key + ".log.csv"), log.str());
      job.params = std::move(result.params);
      job.params_hash = nn::checkpoint_hash(nn::Checkpoint{job.params, {}});
      ++runs;
    } catch (const Error& e) {
      job.error = e.what();
    }
  });
  summary.meta_runs = runs;
  summary.meta_cache_hits = hits;

  // Evaluation corpora, one per target.
  std::map<std::string, std::vector<eval::ContinuationRecord>> corpora;
  for (const auto& t : cfg.targets) {
    if (corpora.count(t)) continue;
    Rng rng(corpus_seed(cfg, t));
    auto corpus = eval::build_eval_corpus(langs::LanguageSpec::parse(t, cfg.pairs_homogeneous), rng, cfg.corpus);
    std::ostringstream text;
    eval::write_corpus(text, corpus);
    write_text(root / "corpora" / (t + ".jsonl"), text.str());
    corpora[t] = std::move(corpus);
  }

  struct Cell {
    ResultRow base;
    std::size_t si, ai, ki;
    std::vector<ResultRow> rows;
  };
  std::vector<Cell> cells;
  for (std::size_t si = 0; si < cfg.meta_sources.size(); ++si)
    for (std::size_t ai = 0; ai < cfg.archs.size(); ++ai)
      for (const auto& target : cfg.targets)
        for (int n : cfg.n_strings)
          for (std::size_t ki = 0; ki < cfg.seeds.size(); ++ki) {
            Cell c{{}, si, ai, ki, {}};
            const auto& src = cfg.meta_sources[si];
            c.base.meta_source = src.label();
            c.base.source_class = src.source_class();
            c.base.arch = arch_label(cfg.archs[ai]);
            c.base.target = target;
            c.base.n_strings = n;
            c.base.seed = cfg.seeds[ki];
            c.base.self_transfer = src.kind == MetaSourceSpec::Kind::Language && src.language == target;
            cells.push_back(std::move(c));
          }

  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    auto& cell = cells[i];
    const auto& arch = cfg.archs[cell.ai];
    const auto& src = cfg.meta_sources[cell.si];
    auto failed = [&](const std::string& why) {
      ResultRow r = cell.base;
      r.status = "failed: " + why;
      r.length_bucket = "le" + std::to_string(cfg.max_length);
      cell.rows = {r};
    };
    try {
      nn::Params init;
      std::string init_id = "unmetatrained";
      std::string meta_ckpt;
      if (src.kind == MetaSourceSpec::Kind::None) {
        init = meta::initial_params(arch, model_seed(cfg, arch, cell.base.seed));
      } else {
        const auto& job = jobs[job_index.at({cell.si, cell.ai, cell.ki})];
        if (!job.error.empty()) return failed(job.error);
        init = job.params;
        init_id = job.params_hash;
        meta_ckpt = job.key;
      }
      const auto spec = langs::LanguageSpec::parse(cell.base.target, cfg.pairs_homogeneous);
      auto schedule = downstream::TrainSchedule::for_strings(cell.base.n_strings);
      schedule.length_lo = cfg.train_length_lo;
      schedule.length_hi = cfg.train_length_hi;
      schedule.clip_norm = cfg.train_clip_norm;
      auto model = downstream::train(init, init_id, spec, schedule,
                                     train_seed(cfg, cell.base.target, cell.base.n_strings, cell.base.seed));
      const auto report = eval::evaluate_model(model.params, corpora.at(cell.base.target), cfg.max_length);

      auto add = [&](const std::string& bucket, const eval::MeanMetrics& m) {
        ResultRow r = cell.base;
        r.length_bucket = bucket;
        r.records = m.count;
        r.mean_f1 = m.f1;
        r.mean_p_val = m.p_val;
        r.mean_bt = m.bt;
        cell.rows.push_back(r);
      };
      add("le" + std::to_string(cfg.max_length), report.within);
      for (const auto& [len, m] : report.by_length) add(std::to_string(len), m);

      auto manifest = downstream::manifest(model);
      manifest["meta_source"] = cell.base.meta_source;
      manifest["meta_checkpoint"] = meta_ckpt;
      manifest["arch_label"] = cell.base.arch;
      manifest["self_transfer"] = cell.base.self_transfer;
      manifest["corpus_seed"] = corpus_seed(cfg, cell.base.target);
      manifest["train_seed"] = train_seed(cfg, cell.base.target, cell.base.n_strings, cell.base.seed);
      manifest["model_seed"] = model_seed(cfg, arch, cell.base.seed);
      manifest["mean_f1"] = report.within.f1;
      write_text(root / "manifests" / (cell_name(cell.base) + ".json"), manifest.dump(2) + "\n");
    } catch (const Error& e) {
      failed(e.what());
    }
  });

  for (auto& cell : cells) {
    if (cell.rows.size() == 1 && cell.rows.front().status != "ok") ++summary.failed_cells;
    for (auto& r : cell.rows) summary.rows.push_back(std::move(r));
  }
  std::ostringstream results;
  write_results_csv(results, summary.rows);
  write_text(root / "results.csv", results.str());
  summary.warnings = write_reports(summary.rows, out_dir);
  return summary;
}

}  // namespace mlfw::runner
