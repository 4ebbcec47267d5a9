#pragma once

#include <string>
#include <vector>

#include "formal_langs/sampling.hpp"
#include "neural_core/checkpoint.hpp"

namespace mlfw::downstream {

struct TrainSchedule {
  int n_strings = 10;
  int sgd_epochs = 5;
  int adam_epochs = 1;
  int batch_size = 32;
  double sgd_lr = 1.0;
  double adam_lr = 5e-4;
  // Language-length range the training strings are drawn from.
  int length_lo = 1, length_hi = 10;
  double clip_norm = 5.0;

  // Standard rows: n = 1 -> (5, 1), 10 -> (5, 1), 100 -> (10, 5).
  // Other n throws InvalidArgument; build the struct directly to override.
  static TrainSchedule for_strings(int n);

  void validate() const;
  int batches_per_epoch() const { return (n_strings + batch_size - 1) / batch_size; }
  int total_steps() const { return (sgd_epochs + adam_epochs) * batches_per_epoch(); }
};

nlohmann::ordered_json to_json(const TrainSchedule& s);

// n draws of (uniform length in [lo, hi], uniform member of that length).
std::vector<langs::CanonicalString> sample_train_set(const langs::LanguageSpec& spec, int n, Rng& rng,
                                                     int lo = 1, int hi = 10);

struct Provenance {
  std::string init = "unmetatrained";  // checkpoint hash of the initialization
  std::string target;
  int n_strings = 0;
  std::uint64_t seed = 0;
};

struct TrainedModel {
  nn::Params params;
  Provenance provenance;
  TrainSchedule schedule;
  int steps = 0;
  double loss_before = 0.0;  // mean loss over the training set
  double loss_after = 0.0;
};

// Samples the training set from derive_seed(seed, "data"), then runs the SGD
// epochs followed by the Adam epochs; epoch e shuffles the batch order with
// derive_seed(seed, "epoch").fork(e). Throws NonFiniteLoss.
TrainedModel train(const nn::Params& init, std::string init_id, const langs::LanguageSpec& target,
                   const TrainSchedule& schedule, std::uint64_t seed);

nlohmann::ordered_json manifest(const TrainedModel& model);

}  // namespace mlfw::downstream
