#include "seizure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>

#include "seizure/error.hpp"

namespace seizure {
namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_labels(std::span<const int> y) {
  for (int v : y) {
    if (v != 0 && v != 1) throw ShapeError("labels must be 0 or 1, got " + std::to_string(v));
  }
}

}  // namespace

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  MetricsReport m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  const std::size_t n = m.total();
  if (n == 0) throw DataError("metrics: no samples");
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(n);
  m.precision = ratio(tp, tp + fp, m.precision_undefined);
  m.recall = ratio(tp, tp + fn, m.recall_undefined);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_undefined = true;
  }

  // Support-weighted average of the per-class precision and recall.
  bool ignored = false;
  const double neg_precision = ratio(tn, tn + fn, ignored);
  const double neg_recall = ratio(tn, tn + fp, ignored);
  const auto pos_support = static_cast<double>(tp + fn);
  const auto neg_support = static_cast<double>(tn + fp);
  m.weighted_precision = (pos_support * m.precision + neg_support * neg_precision) / static_cast<double>(n);
  m.weighted_recall = (pos_support * m.recall + neg_support * neg_recall) / static_cast<double>(n);
  return m;
}

MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ShapeError("metrics: " + std::to_string(y_true.size()) + " labels vs " + std::to_string(y_pred.size()) +
                     " predictions");
  }
  if (y_true.empty()) throw DataError("metrics: empty input");
  check_labels(y_true);
  check_labels(y_pred);
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i] == 1) (y_true[i] == 1 ? tp : fp)++;
    else (y_true[i] == 1 ? fn : tn)++;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

RocCurve roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw ShapeError("ROC: labels and scores differ in length");
  check_labels(y_true);
  const auto P = static_cast<std::uint64_t>(std::count(y_true.begin(), y_true.end(), 1));
  const std::uint64_t N = y_true.size() - P;
  if (P == 0 || N == 0) throw DataError("AUC undefined: only one class present");
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("ROC: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::uint64_t tp = 0, fp = 0, twice_area = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::uint64_t dp = 0, dn = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) (y_true[order[i]] == 1 ? dp : dn)++;
    twice_area += dn * (2 * tp + dp);
    tp += dp;
    fp += dn;
    roc.points.push_back({s, static_cast<double>(fp) / static_cast<double>(N), static_cast<double>(tp) / static_cast<double>(P)});
  }
  roc.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(P) * static_cast<double>(N));
  return roc;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

CvSummary summarize_folds(std::span<const MetricsReport> folds) {
  CvSummary out;
  out.folds = folds.size();
  auto collect = [&](auto member) {
    std::vector<double> v;
    for (const MetricsReport& m : folds) v.push_back(m.*member);
    return summarize(v);
  };
  out.accuracy = collect(&MetricsReport::accuracy);
  out.precision = collect(&MetricsReport::precision);
  out.recall = collect(&MetricsReport::recall);
  out.f1 = collect(&MetricsReport::f1);
  out.weighted_precision = collect(&MetricsReport::weighted_precision);
  out.weighted_recall = collect(&MetricsReport::weighted_recall);
  std::vector<double> aucs;
  for (const MetricsReport& m : folds) {
    if (m.roc) aucs.push_back(m.roc->auc);
  }
  out.auc = summarize(aucs);
  return out;
}

std::string format_cv_summary(const CvSummary& s) {
  std::string out;
  char line[160];
  auto percent = [&](const char* name, const MetricSummary& m) {
    std::snprintf(line, sizeof line, "mean %s of %.2f%% (±%.2f%%)\n", name, 100.0 * m.mean, 100.0 * m.stddev);
    out += line;
  };
  percent("accuracy", s.accuracy);
  percent("precision", s.precision);
  percent("recall", s.recall);
  percent("F1-score", s.f1);
  std::snprintf(line, sizeof line, "mean AUC of %.4f (±%.4f)\n", s.auc.mean, s.auc.stddev);
  out += line;
  return out;
}

}  // namespace seizure
