#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "seizure/feature_matrix.hpp"

namespace seizure {

struct KnnConfig {
  std::size_t k = 2;
  /// Weight each neighbour's vote by the inverse frequency of its class.
  bool balanced_weights = false;
};

/// Majority class among the k Euclidean-nearest training rows. A tied vote
/// goes to the class of the single nearest row; equal distances are ordered by
/// lower row index.
int knn_classify(const FeatureMatrix& train_X, std::span<const int> train_y, std::span<const double> query, std::size_t k);

struct KnnModel {
  FeatureMatrix X;
  std::vector<int> y;
  KnnConfig config;
  std::array<double, 2> class_weights{1.0, 1.0};
};

KnnModel knn_fit(FeatureMatrix X, std::vector<int> y, const KnnConfig& cfg);

/// Weighted share of neighbour votes for class 1, per query row.
std::vector<double> knn_scores(const KnnModel& m, const FeatureMatrix& queries);
std::vector<int> knn_predict(const KnnModel& m, const FeatureMatrix& queries);

}  // namespace seizure
