#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seizure/feature_matrix.hpp"

namespace seizure {

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::array<std::uint32_t, 2> counts{0, 0};  // training class counts reaching the node

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const;
  /// Majority class at the leaf; ties go to class 0.
  int predict(std::span<const double> x) const;
  bool operator==(const DecisionTree&) const = default;
};

/// 1 - sum_c p_c^2.
double gini(std::size_t n0, std::size_t n1) noexcept;

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gini_gain = 0.0;  // parent impurity minus weighted child impurity
};

/// Best Gini split of `rows` over `candidate_features`, thresholds at
/// midpoints between consecutive distinct sorted values. nullopt if no split
/// lowers the impurity.
std::optional<Split> best_split(const FeatureMatrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features);

/// Convenience overload over every row of X.
std::optional<Split> best_split(const FeatureMatrix& X, std::span<const int> y,
                                std::span<const std::size_t> candidate_features);

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // 0 = floor(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RFModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  std::size_t n_features = 0;

  bool operator==(const RFModel& o) const { return trees == o.trees && n_features == o.n_features; }
};

/// Grows one tree on `rows` (duplicates allowed) with per-node feature sampling.
DecisionTree grow_tree(const FeatureMatrix& X, std::span<const int> y, std::vector<std::size_t> rows,
                       const ForestConfig& cfg, std::uint64_t seed);

RFModel rf_fit(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& cfg);

/// Bootstrap rows used by tree `t` (reproducible from the config seed).
std::vector<std::size_t> rf_bootstrap_rows(std::size_t n, const ForestConfig& cfg, std::size_t t);

/// Fraction of trees voting class 1.
std::vector<double> rf_scores(const RFModel& m, const FeatureMatrix& X);
/// Majority vote; a tie goes to class 0.
std::vector<int> rf_predict(const RFModel& m, const FeatureMatrix& X);

}  // namespace seizure
