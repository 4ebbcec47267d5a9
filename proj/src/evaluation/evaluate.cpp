#include "evaluation/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "common/error.hpp"
#include "neural_core/network.hpp"

namespace mlfw::eval {

void MeanMetrics::add(const MetricTriple& m) {
  ++count;
  p_val += m.p_val;
  bt += m.bt;
  f1 += m.f1;
}

MeanMetrics MeanMetrics::finished() const {
  MeanMetrics out = *this;
  if (count > 0) {
    const double n = static_cast<double>(count);
    out.p_val /= n;
    out.bt /= n;
    out.f1 /= n;
  }
  return out;
}

namespace {

EvalReport summarize(std::vector<RecordScore> scores, int max_length) {
  EvalReport r;
  r.max_length = max_length;
  for (const auto& s : scores) {
    auto& lang = r.languages[s.lang];
    r.by_length[s.length].add(s.metrics);
    lang.by_length[s.length].add(s.metrics);
    if (s.length <= max_length) {
      r.within.add(s.metrics);
      lang.within.add(s.metrics);
    }
  }
  r.within = r.within.finished();
  for (auto& [_, m] : r.by_length) m = m.finished();
  double lang_sum = 0.0;
  int lang_count = 0;
  for (auto& [_, lang] : r.languages) {
    lang.within = lang.within.finished();
    for (auto& [__, m] : lang.by_length) m = m.finished();
    if (lang.within.count > 0) {
      lang_sum += lang.within.f1;
      ++lang_count;
    }
  }
  r.language_mean_f1 = lang_count > 0 ? lang_sum / lang_count : 0.0;
  r.records = std::move(scores);
  return r;
}

}  // namespace

EvalReport evaluate_distributions(std::span<const ContinuationRecord> corpus,
                                  std::span<const std::vector<double>> dists, int max_length) {
  if (dists.size() != corpus.size()) fail(ErrorCode::ShapeMismatch, "one distribution per record required");
  std::vector<RecordScore> scores;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    scores.push_back({i, corpus[i].lang, corpus[i].length, score(dists[i], corpus[i].valid)});
  return summarize(std::move(scores), max_length);
}

EvalReport evaluate_model(const nn::Params& params, std::span<const ContinuationRecord> corpus, int max_length,
                          int batch_strings) {
  if (params.arch.vocab_size != langs::kVocabSize) fail(ErrorCode::ShapeMismatch, "model vocabulary must be 10");
  if (batch_strings < 1) fail(ErrorCode::InvalidArgument, "batch_strings must be positive");
  const auto groups = group_strings(corpus);
  std::vector<RecordScore> scores(corpus.size());
  std::vector<double> dist(langs::kVocabSize);
  for (std::size_t g0 = 0; g0 < groups.size(); g0 += static_cast<std::size_t>(batch_strings)) {
    const std::size_t g1 = std::min(groups.size(), g0 + static_cast<std::size_t>(batch_strings));
    std::vector<SymbolString> rows;
    for (std::size_t g = g0; g < g1; ++g) rows.push_back(corpus[groups[g].end - 1].prefix);
    const auto batch = nn::make_batch(rows);
    const auto fp = nn::forward(params, batch, batch.length - 1);
    for (std::size_t g = g0; g < g1; ++g) {
      for (std::size_t i = groups[g].begin; i < groups[g].end; ++i) {
        const auto& rec = corpus[i];
        const auto col = fp.column(static_cast<int>(g - g0), static_cast<int>(rec.prefix.size()));
        const auto logits = fp.logits.col(col).template cast<double>().eval();
        const double top = logits.maxCoeff();
        double z = 0.0;
        for (int v = 0; v < langs::kVocabSize; ++v) z += dist[static_cast<std::size_t>(v)] = std::exp(logits(v) - top);
        for (double& p : dist) p /= z;
        scores[i] = {i, rec.lang, rec.length, score(dist, rec.valid)};
      }
    }
  }
  return summarize(std::move(scores), max_length);
}

void write_record_csv(std::ostream& out, const EvalReport& report) {
  out << "lang,record_id,length,p_val,bt,f1\n";
  char buf[160];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf, ",%zu,%d,%.17g,%.17g,%.17g\n", r.record_id, r.length, r.metrics.p_val,
                  r.metrics.bt, r.metrics.f1);
    out << r.lang << buf;
  }
}

namespace {

void aggregate_row(std::ostream& out, const std::string& checkpoint, const std::string& lang, int n_strings,
                   const std::string& bucket, const MeanMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, ",%zu,%.17g,%.17g,%.17g\n", m.count, m.p_val, m.bt, m.f1);
  out << checkpoint << ',' << lang << ',' << n_strings << ',' << bucket << buf;
}

}  // namespace

void write_aggregate_csv(std::ostream& out, const EvalReport& report, const std::string& checkpoint,
                         int n_strings, bool header) {
  if (header) out << "checkpoint,lang,n_strings,length_bucket,records,mean_p_val,mean_bt,mean_f1\n";
  const std::string within = "le" + std::to_string(report.max_length);
  aggregate_row(out, checkpoint, "*", n_strings, within, report.within);
  for (const auto& [len, m] : report.by_length) aggregate_row(out, checkpoint, "*", n_strings, std::to_string(len), m);
  MeanMetrics unweighted;
  unweighted.count = report.languages.size();
  unweighted.f1 = report.language_mean_f1;
  for (const auto& [_, lang] : report.languages) {
    unweighted.p_val += lang.within.p_val / static_cast<double>(report.languages.size());
    unweighted.bt += lang.within.bt / static_cast<double>(report.languages.size());
  }
  aggregate_row(out, checkpoint, "*languages", n_strings, within, unweighted);
  for (const auto& [name, lang] : report.languages) {
    aggregate_row(out, checkpoint, name, n_strings, within, lang.within);
    for (const auto& [len, m] : lang.by_length) aggregate_row(out, checkpoint, name, n_strings, std::to_string(len), m);
  }
}

}  // namespace mlfw::eval
