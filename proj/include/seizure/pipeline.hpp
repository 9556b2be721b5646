#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "seizure/feature_matrix.hpp"
#include "seizure/metrics.hpp"
#include "seizure/model_io.hpp"
#include "seizure/smote.hpp"
#include "seizure/split.hpp"

namespace seizure {

/// Model choice and the hyperparameters of every model family.
struct ModelSpec {
  ModelKind kind = ModelKind::logreg;
  KnnConfig knn;
  LogRegConfig logreg;
  ForestConfig rf;
  SvmConfig svm;
  LstmTrainConfig lstm;
  std::size_t sequence_length = 10;
};

struct PipelineConfig {
  ModelSpec model;
  bool use_smote = false;
  SmoteConfig smote;
  double threshold = 0.5;
  Task task = Task::detection;
  /// Seed for everything downstream of the split. Overrides the seeds in the
  /// component configs, which are derived from it per component.
  std::uint64_t seed = 0;
};

/// Copies `data` with every row tagged `tag`.
Dataset tag_rows(Dataset data, SplitTag tag);

/// Fits the scaler on `train`, scales, oversamples (SMOTE for feature models,
/// window duplication for the LSTM) and fits the model. `validation` is used
/// for LSTM model selection only and may be empty.
ModelArtifact train_model(const Dataset& train, const Dataset& validation, const PipelineConfig& cfg);

enum class LeakagePolicy { enforce, allow };

struct Evaluation {
  MetricsReport report;  // roc filled when both classes are present
  std::vector<double> scores;
  std::vector<int> predictions;
  std::vector<int> labels;
  std::vector<RowMeta> meta;  // one per scored row (window end for the LSTM)
};

/// Scores raw feature rows with the artifact's scaler and model. Unless
/// `policy` is `allow`, rows from any training patient abort with LeakageError.
Evaluation score_rows(const ModelArtifact& model, const Dataset& rows, LeakagePolicy policy = LeakagePolicy::enforce);

/// score_rows plus metrics.
Evaluation evaluate_model(const ModelArtifact& model, const Dataset& test, LeakagePolicy policy = LeakagePolicy::enforce);

struct HoldoutResult {
  SplitPlan plan;
  ModelArtifact model;
  Evaluation validation;  // empty when the validation side has no rows
  Evaluation test;
};

/// Patient-disjoint holdout: split patients, assemble the three row sets
/// through the leakage gate, train, evaluate on validation and test.
HoldoutResult run_holdout(const Dataset& data, std::array<double, 3> ratios, std::uint64_t split_seed,
                          const PipelineConfig& cfg);

/// Row-level random split that ignores patient identity. Leaks by design;
/// exists only to measure how optimistic such a split is.
HoldoutResult run_record_holdout(const Dataset& data, std::array<double, 3> ratios, std::uint64_t split_seed,
                                 const PipelineConfig& cfg);

struct CvResult {
  std::vector<Fold> folds;
  std::vector<Evaluation> evaluations;
  std::vector<MetricsReport> reports;
  CvSummary summary;
};

/// Patient-wise k-fold cross-validation; fold i trains on the other folds.
CvResult run_cv(const Dataset& data, std::size_t k, std::uint64_t split_seed, const PipelineConfig& cfg);

}  // namespace seizure
