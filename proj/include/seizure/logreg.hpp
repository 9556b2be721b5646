#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seizure/feature_matrix.hpp"

namespace seizure {

struct LogRegConfig {
  double learning_rate = 0.5;
  double l2_lambda = 1e-4;
  std::size_t max_iters = 500;
  double tolerance = 1e-6;  // stop when the gradient's max-norm drops below
  /// Per-class loss weights {w0, w1}; ignored when `balanced_weights` is set.
  std::array<double, 2> class_weights{1.0, 1.0};
  bool balanced_weights = false;
  std::uint64_t seed = 0;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogRegConfig config;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Logistic function without overflow for any finite input.
double sigmoid(double z) noexcept;

/// Class-weighted mean binary cross-entropy plus (l2_lambda / 2) ||w||^2.
double logreg_loss(std::span<const double> weights, double bias, const FeatureMatrix& X, std::span<const int> y,
                   const std::array<double, 2>& class_weights, double l2_lambda);

/// Gradient of logreg_loss; the last entry is d/d(bias).
std::vector<double> logreg_gradient(std::span<const double> weights, double bias, const FeatureMatrix& X,
                                    std::span<const int> y, const std::array<double, 2>& class_weights, double l2_lambda);

/// Full-batch gradient descent from w = 0, b = 0.
LogRegModel logreg_fit(const FeatureMatrix& X, std::span<const int> y, const LogRegConfig& cfg);

std::vector<double> logreg_predict_proba(const LogRegModel& m, const FeatureMatrix& X);
std::vector<int> logreg_predict(const LogRegModel& m, const FeatureMatrix& X, double threshold = 0.5);

}  // namespace seizure
