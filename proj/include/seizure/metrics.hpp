#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seizure {

struct RocPoint {
  double threshold = 0.0;  // scores >= threshold are called positive
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0, 0) to (1, 1)
  double auc = 0.5;
};

/// Confusion counts and the metrics derived from them. Ratios with a zero
/// denominator are reported as 0 and flagged as undefined.
struct MetricsReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  std::optional<RocCurve> roc;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred);

/// Rebuilds every ratio from the confusion counts alone.
MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

/// Threshold sweep over all distinct scores. AUC counts tied positive/negative
/// pairs as one half and is computed in integer pair units, so it equals the
/// pairwise statistic exactly.
RocCurve roc_auc(std::span<const int> y_true, std::span<const double> scores);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
};

struct CvSummary {
  std::size_t folds = 0;
  MetricSummary accuracy, precision, recall, f1, auc, weighted_precision, weighted_recall;
};

MetricSummary summarize(std::span<const double> values);
CvSummary summarize_folds(std::span<const MetricsReport> folds);

/// "mean accuracy of 70.77% (±3.55%)"-style lines; AUC is kept as a fraction.
std::string format_cv_summary(const CvSummary& s);

}  // namespace seizure
