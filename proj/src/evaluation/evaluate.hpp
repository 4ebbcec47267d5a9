#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "evaluation/corpus.hpp"
#include "evaluation/metrics.hpp"
#include "neural_core/checkpoint.hpp"

namespace mlfw::eval {

struct RecordScore {
  std::size_t record_id = 0;
  std::string lang;
  int length = 0;
  MetricTriple metrics;
};

struct MeanMetrics {
  std::size_t count = 0;
  double p_val = 0.0, bt = 0.0, f1 = 0.0;

  void add(const MetricTriple& m);
  MeanMetrics finished() const;  // sums -> means
};

struct LanguageReport {
  MeanMetrics within;                  // records with length <= max_length
  std::map<int, MeanMetrics> by_length;
};

struct EvalReport {
  int max_length = 10;
  std::vector<RecordScore> records;
  MeanMetrics within;                  // pooled over records, length <= max_length
  double language_mean_f1 = 0.0;       // unweighted mean of per-language `within` F1
  std::map<int, MeanMetrics> by_length;
  std::map<std::string, LanguageReport> languages;
};

// Scores every record against the model's next-token distribution after its
// prefix (teacher forcing, strings batched in corpus order). Distributions
// are softmaxed in double precision from the model's logits.
EvalReport evaluate_model(const nn::Params& params, std::span<const ContinuationRecord> corpus,
                          int max_length = 10, int batch_strings = 32);

// Scores a corpus against caller-supplied distributions, one per record.
EvalReport evaluate_distributions(std::span<const ContinuationRecord> corpus,
                                  std::span<const std::vector<double>> dists, int max_length = 10);

// lang,record_id,length,p_val,bt,f1
void write_record_csv(std::ostream& out, const EvalReport& report);

// checkpoint,lang,n_strings,length_bucket,records,mean_p_val,mean_bt,mean_f1
// Buckets: "le<max_length>" then each length. lang "*" pools all records;
// lang "*languages" is the unweighted mean over languages (le bucket only).
void write_aggregate_csv(std::ostream& out, const EvalReport& report, const std::string& checkpoint,
                         int n_strings, bool header = true);

}  // namespace mlfw::eval
