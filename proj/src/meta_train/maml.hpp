#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "meta_train/task.hpp"
#include "neural_core/arch.hpp"
#include "neural_core/checkpoint.hpp"

namespace mlfw::meta {

struct MetaConfig {
  nn::ArchDescriptor arch;
  double inner_lr = 1.0;
  double outer_lr = 1e-4;
  int inner_loops_total = 25000;
  int meta_accumulation = 2;
  int support_batches = 20;
  int support_batch_size = 10;
  int query_batches = 2;
  int query_batch_size = 10;
  // Global-norm clip for inner SGD steps and for the outer meta-gradient.
  double clip_norm = 5.0;
  bool average_meta_grads = true;
  std::uint64_t seed = 0;

  void validate() const;
  TaskShape task_shape() const;
};

nlohmann::ordered_json to_json(const MetaConfig& cfg);
MetaConfig meta_config_from_json(const nlohmann::json& j);

struct InnerResult {
  nn::Params adapted;
  nn::Params meta_grad;
  double query_loss = 0.0;
  int clipped_steps = 0;
};

// Clones init, takes one SGD step per support batch, then evaluates the query
// batches at the adapted weights. meta_grad is the query-loss gradient there
// (first order). Throws NonFiniteLoss.
InnerResult inner_loop(const nn::Params& init, const TaskInstance& task, const MetaConfig& cfg);

struct MetaLogRow {
  int outer_step = 0;
  double mean_query_loss = 0.0;
  double grad_norm = 0.0;
  bool clipped = false;  // outer clip or any inner clip during this step
};

struct MetaResult {
  nn::Params params;
  std::vector<MetaLogRow> log;
  std::vector<double> task_losses;  // query loss per task, in task order
};

using MetaProgress = std::function<void(const MetaLogRow&)>;

// Task k of the run draws from the stream derive_seed(seed, "tasks").fork(k);
// the initialization from derive_seed(seed, "init").
MetaResult meta_train(const MetaConfig& cfg, const TaskSource& source, const MetaProgress& progress = {});

// Initialization used by meta_train and by unmetatrained baselines.
nn::Params initial_params(const nn::ArchDescriptor& arch, std::uint64_t seed);

void write_meta_log(std::ostream& out, const std::vector<MetaLogRow>& log);

}  // namespace mlfw::meta
