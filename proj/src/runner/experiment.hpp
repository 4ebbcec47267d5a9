#pragma once

#include <optional>
#include <string>
#include <vector>

#include "downstream/train.hpp"
#include "evaluation/corpus.hpp"
#include "meta_train/maml.hpp"

namespace mlfw::runner {

enum class SourceClass { Unmetatrained, Regular, ContextFree, ContextSensitive, ZooSimple, ZooComplex };

const char* to_string(SourceClass c);

// "none", a language name, or "zoo:<temperature>".
struct MetaSourceSpec {
  enum class Kind { None, Language, Zoo } kind = Kind::None;
  std::string language;
  double temperature = 0.0;

  static MetaSourceSpec parse(const std::string& text);
  std::string label() const;
  // Zoo sources with negative temperature favor short descriptions (simple).
  SourceClass source_class() const;

  bool operator==(const MetaSourceSpec&) const = default;
};

struct ZooSettings {
  std::string path;  // load from here when set, otherwise build
  int size = 5000;
  double mdl_lo = 0.0;
  double mdl_hi = 100.0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  std::vector<MetaSourceSpec> meta_sources;
  std::vector<nn::ArchDescriptor> archs;
  std::vector<std::string> targets;
  std::vector<int> n_strings;
  std::vector<std::uint64_t> seeds;
  bool pairs_homogeneous = false;
  // Template for every meta-training run; arch and seed are filled per cell.
  meta::MetaConfig meta;
  ZooSettings zoo;
  int max_length = 10;
  eval::CorpusOptions corpus;
  int train_length_lo = 1, train_length_hi = 10;
  double train_clip_norm = 5.0;
  int threads = 1;

  void validate() const;
};

// Desk-scale defaults: hidden 64, embed 64, 2000 meta tasks.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

std::string arch_label(const nn::ArchDescriptor& arch);

struct ResultRow {
  std::string meta_source;
  SourceClass source_class = SourceClass::Unmetatrained;
  std::string arch;
  std::string target;
  int n_strings = 0;
  std::uint64_t seed = 0;
  bool self_transfer = false;
  std::string status = "ok";
  std::string length_bucket;
  std::size_t records = 0;
  std::optional<double> mean_f1, mean_p_val, mean_bt;
};

struct GridSummary {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;
  int meta_runs = 0;       // meta-training runs executed
  int meta_cache_hits = 0; // checkpoints reused from the store
  int failed_cells = 0;
};

// Writes into out_dir:
//   results.csv, aggregates.csv (meta-source class table), arch.csv,
//   lengths.csv and .dat twins, manifests/<cell>.json, corpora/<target>.jsonl,
//   checkpoints/<key>.mlfw with <key>.log.csv
GridSummary run_grid(const ExperimentConfig& cfg, const std::string& out_dir);

// Seed of the meta-training run (and of the matching fresh initialization)
// for one architecture and seed index.
std::uint64_t model_seed(const ExperimentConfig& cfg, const nn::ArchDescriptor& arch, std::uint64_t seed);
std::uint64_t train_seed(const ExperimentConfig& cfg, const std::string& target, int n, std::uint64_t seed);
std::uint64_t corpus_seed(const ExperimentConfig& cfg, const std::string& target);

}  // namespace mlfw::runner
