#include "downstream/train.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "neural_core/network.hpp"
#include "neural_core/optim.hpp"

namespace mlfw::downstream {

TrainSchedule TrainSchedule::for_strings(int n) {
  TrainSchedule s;
  s.n_strings = n;
  switch (n) {
    case 1:
    case 10:
      s.sgd_epochs = 5;
      s.adam_epochs = 1;
      break;
    case 100:
      s.sgd_epochs = 10;
      s.adam_epochs = 5;
      break;
    default:
      fail(ErrorCode::InvalidArgument, "no standard schedule for n_strings=" + std::to_string(n));
  }
  return s;
}

void TrainSchedule::validate() const {
  if (n_strings < 1 || sgd_epochs < 0 || adam_epochs < 0 || batch_size < 1 || !(sgd_lr >= 0.0) ||
      !(adam_lr >= 0.0) || length_lo < 1 || length_hi < length_lo)
    fail(ErrorCode::InvalidArgument, "invalid training schedule");
}

nlohmann::ordered_json to_json(const TrainSchedule& s) {
  return {{"n_strings", s.n_strings}, {"sgd_epochs", s.sgd_epochs}, {"adam_epochs", s.adam_epochs},
          {"batch_size", s.batch_size}, {"sgd_lr", s.sgd_lr},       {"adam_lr", s.adam_lr},
          {"length_lo", s.length_lo},   {"length_hi", s.length_hi}, {"clip_norm", s.clip_norm}};
}

std::vector<langs::CanonicalString> sample_train_set(const langs::LanguageSpec& spec, int n, Rng& rng, int lo,
                                                     int hi) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "training set needs n >= 1");
  return langs::sample_by_length_range(spec, lo, hi, n, rng);
}

namespace {

double mean_loss(const nn::Params& p, const std::vector<langs::SymbolString>& data, int batch_size) {
  double total = 0.0;
  int targets = 0;
  for (std::size_t i = 0; i < data.size(); i += static_cast<std::size_t>(batch_size)) {
    const auto n = std::min(data.size() - i, static_cast<std::size_t>(batch_size));
    auto batch = nn::make_batch(std::span(data).subspan(i, n));
    int count = 0;
    for (int t : batch.tokens) count += t != langs::kPad;
    count -= batch.batch;  // START is never a target
    total += nn::loss(p, batch) * count;
    targets += count;
  }
  return total / targets;
}

}  // namespace

TrainedModel train(const nn::Params& init, std::string init_id, const langs::LanguageSpec& target,
                   const TrainSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  TrainedModel out;
  out.schedule = schedule;
  out.provenance = {std::move(init_id), std::string(target.name_str()), schedule.n_strings, seed};
  out.params = init;

  Rng data_rng(derive_seed(seed, "data"));
  std::vector<langs::SymbolString> data;
  for (auto& s : sample_train_set(target, schedule.n_strings, data_rng, schedule.length_lo, schedule.length_hi))
    data.push_back(std::move(s.symbols));
  out.loss_before = mean_loss(out.params, data, schedule.batch_size);

  const Rng epoch_streams(derive_seed(seed, "epoch"));
  std::vector<std::size_t> order(data.size());
  auto adam = nn::AdamState<float>::zeros_for(out.params);
  const int epochs = schedule.sgd_epochs + schedule.adam_epochs;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = epoch_streams.fork(static_cast<std::uint64_t>(epoch));
    rng.shuffle(std::span(order));
    const bool sgd = epoch < schedule.sgd_epochs;
    for (int b = 0; b < schedule.batches_per_epoch(); ++b) {
      std::vector<langs::SymbolString> rows;
      for (std::size_t i = static_cast<std::size_t>(b) * schedule.batch_size;
           i < order.size() && i < static_cast<std::size_t>(b + 1) * schedule.batch_size; ++i)
        rows.push_back(data[order[i]]);
      auto lg = nn::loss_and_gradient(out.params, nn::make_batch(rows));
      if (!std::isfinite(lg.loss))
        fail(ErrorCode::NonFiniteLoss, "downstream " + out.provenance.target + ": epoch " +
                                           std::to_string(epoch) + " batch " + std::to_string(b));
      nn::clip_global_norm(lg.grads, schedule.clip_norm);
      if (sgd)
        nn::sgd_step(out.params, lg.grads, schedule.sgd_lr);
      else
        nn::adam_step(adam, out.params, lg.grads, schedule.adam_lr);
      ++out.steps;
    }
  }
  out.loss_after = mean_loss(out.params, data, schedule.batch_size);
  return out;
}

nlohmann::ordered_json manifest(const TrainedModel& model) {
  nn::Checkpoint ck{model.params, {}};
  return {{"init", model.provenance.init},
          {"target", model.provenance.target},
          {"n_strings", model.provenance.n_strings},
          {"seed", model.provenance.seed},
          {"arch", nn::to_json(model.params.arch)},
          {"schedule", to_json(model.schedule)},
          {"steps", model.steps},
          {"loss_before", model.loss_before},
          {"loss_after", model.loss_after},
          {"params_hash", nn::checkpoint_hash(ck)}};
}

}  // namespace mlfw::downstream
