#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seizure/feature_matrix.hpp"

namespace seizure {

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  double target_ratio = 1.0;  // minority count after resampling = floor(ratio * majority)
  std::uint64_t seed = 0;
};

struct SmoteResult {
  FeatureMatrix X;  // original rows first, synthetic rows appended
  std::vector<int> y;
  int minority_class = 1;
  std::size_t synthetic_count = 0;
  std::size_t k_used = 0;
  /// (source row, neighbour row) in the input matrix for each synthetic row.
  std::vector<std::pair<std::size_t, std::size_t>> provenance;
  std::vector<std::string> warnings;
};

/// Interpolation weight for synthetic row `i`; must return a value in [0, 1).
using LambdaSource = std::function<double(std::size_t)>;

/// Oversamples the minority class by interpolating between a minority row and
/// one of its k nearest minority neighbours. Rows must come from the training
/// side of a split.
SmoteResult smote(const FeatureMatrix& X, std::span<const int> y, const SmoteConfig& cfg);

/// Same, with the interpolation weights supplied by the caller.
SmoteResult smote(const FeatureMatrix& X, std::span<const int> y, const SmoteConfig& cfg, const LambdaSource& lambda);

}  // namespace seizure
