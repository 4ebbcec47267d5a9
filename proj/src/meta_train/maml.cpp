#include "meta_train/maml.hpp"

#include <cmath>
#include <ostream>

#include "common/error.hpp"
#include "neural_core/network.hpp"
#include "neural_core/optim.hpp"

namespace mlfw::meta {

void MetaConfig::validate() const {
  arch.validate();
  if (!(inner_lr >= 0.0) || !(outer_lr > 0.0) || inner_loops_total < 1 || meta_accumulation < 1 ||
      support_batches < 0 || support_batch_size < 1 || query_batches < 1 || query_batch_size < 1)
    fail(ErrorCode::InvalidArgument, "invalid meta-training configuration");
}

TaskShape MetaConfig::task_shape() const {
  TaskShape s;
  s.support = support_batches * support_batch_size;
  s.query = query_batches * query_batch_size;
  return s;
}

nlohmann::ordered_json to_json(const MetaConfig& cfg) {
  return {{"arch", nn::to_json(cfg.arch)},
          {"inner_lr", cfg.inner_lr},
          {"outer_lr", cfg.outer_lr},
          {"inner_loops_total", cfg.inner_loops_total},
          {"meta_accumulation", cfg.meta_accumulation},
          {"support_batches", cfg.support_batches},
          {"support_batch_size", cfg.support_batch_size},
          {"query_batches", cfg.query_batches},
          {"query_batch_size", cfg.query_batch_size},
          {"clip_norm", cfg.clip_norm},
          {"average_meta_grads", cfg.average_meta_grads},
          {"seed", cfg.seed}};
}

MetaConfig meta_config_from_json(const nlohmann::json& j) {
  MetaConfig c;
  if (j.contains("arch")) c.arch = nn::arch_from_json(j.at("arch"));
  c.inner_lr = j.value("inner_lr", c.inner_lr);
  c.outer_lr = j.value("outer_lr", c.outer_lr);
  c.inner_loops_total = j.value("inner_loops_total", c.inner_loops_total);
  c.meta_accumulation = j.value("meta_accumulation", c.meta_accumulation);
  c.support_batches = j.value("support_batches", c.support_batches);
  c.support_batch_size = j.value("support_batch_size", c.support_batch_size);
  c.query_batches = j.value("query_batches", c.query_batches);
  c.query_batch_size = j.value("query_batch_size", c.query_batch_size);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.average_meta_grads = j.value("average_meta_grads", c.average_meta_grads);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

namespace {

std::span<const SymbolString> slice(const std::vector<SymbolString>& v, int index, int size) {
  const auto begin = static_cast<std::size_t>(index) * static_cast<std::size_t>(size);
  if (begin + static_cast<std::size_t>(size) > v.size())
    fail(ErrorCode::InvalidArgument, "task holds too few strings for the batch schedule");
  return std::span(v).subspan(begin, static_cast<std::size_t>(size));
}

void require_finite(double loss, const char* where) {
  if (!std::isfinite(loss)) fail(ErrorCode::NonFiniteLoss, std::string("non-finite loss in ") + where);
}

}  // namespace

InnerResult inner_loop(const nn::Params& init, const TaskInstance& task, const MetaConfig& cfg) {
  InnerResult r;
  r.adapted = init;
  for (int b = 0; b < cfg.support_batches; ++b) {
    auto batch = nn::make_batch(slice(task.support, b, cfg.support_batch_size));
    auto lg = nn::loss_and_gradient(r.adapted, batch);
    require_finite(lg.loss, "support batch");
    if (nn::clip_global_norm(lg.grads, cfg.clip_norm).clipped) ++r.clipped_steps;
    nn::sgd_step(r.adapted, lg.grads, cfg.inner_lr);
  }
  r.meta_grad = nn::zeros_like(init);
  const float share = 1.0f / static_cast<float>(cfg.query_batches);
  for (int b = 0; b < cfg.query_batches; ++b) {
    auto batch = nn::make_batch(slice(task.query, b, cfg.query_batch_size));
    auto lg = nn::loss_and_gradient(r.adapted, batch);
    require_finite(lg.loss, "query batch");
    r.query_loss += lg.loss / cfg.query_batches;
    nn::axpy(r.meta_grad, share, lg.grads);
  }
  if (!nn::all_finite(r.meta_grad)) fail(ErrorCode::NonFiniteLoss, "non-finite meta-gradient");
  return r;
}

nn::Params initial_params(const nn::ArchDescriptor& arch, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "init"));
  return nn::init_params<float>(arch, rng);
}

MetaResult meta_train(const MetaConfig& cfg, const TaskSource& source, const MetaProgress& progress) {
  cfg.validate();
  MetaResult result;
  result.params = initial_params(cfg.arch, cfg.seed);
  auto adam = nn::AdamState<float>::zeros_for(result.params);
  const Rng task_streams(derive_seed(cfg.seed, "tasks"));
  const auto shape = cfg.task_shape();

  int consumed = 0;
  for (int step = 0; consumed < cfg.inner_loops_total; ++step) {
    const int group = std::min(cfg.meta_accumulation, cfg.inner_loops_total - consumed);
    auto accumulated = nn::zeros_like(result.params);
    MetaLogRow row;
    row.outer_step = step;
    for (int k = 0; k < group; ++k) {
      const int task_index = consumed + k;
      Rng rng = task_streams.fork(static_cast<std::uint64_t>(task_index));
      try {
        auto task = make_task(source, rng, shape);
        auto inner = inner_loop(result.params, task, cfg);
        nn::axpy(accumulated, 1.0f, inner.meta_grad);
        row.mean_query_loss += inner.query_loss / group;
        row.clipped = row.clipped || inner.clipped_steps > 0;
        result.task_losses.push_back(inner.query_loss);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteLoss) throw;
        fail(ErrorCode::NonFiniteLoss, source.describe() + " task " + std::to_string(task_index) +
                                           " (outer step " + std::to_string(step) + "): " + e.what());
      }
    }
    if (cfg.average_meta_grads) nn::scale(accumulated, 1.0f / static_cast<float>(group));
    const auto clip = nn::clip_global_norm(accumulated, cfg.clip_norm);
    row.grad_norm = clip.norm;
    row.clipped = row.clipped || clip.clipped;
    nn::adam_step(adam, result.params, accumulated, cfg.outer_lr);
    consumed += group;
    result.log.push_back(row);
    if (progress) progress(row);
  }
  return result;
}

void write_meta_log(std::ostream& out, const std::vector<MetaLogRow>& log) {
  out << "outer_step,mean_query_loss,grad_norm,clipped_flag\n";
  char buf[128];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%d\n", r.outer_step, r.mean_query_loss, r.grad_norm,
                  r.clipped ? 1 : 0);
    out << buf;
  }
}

}  // namespace mlfw::meta
