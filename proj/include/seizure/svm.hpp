#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seizure/feature_matrix.hpp"

namespace seizure {

struct SvmConfig {
  double C = 1.0;
  double gamma = 0.0;  // 0 = 1 / n_features
  double tol = 1e-3;
  std::size_t max_passes = 200;  // iteration budget in multiples of the training row count
  /// Training rows above this are subsampled (seeded) before solving; the
  /// solver keeps the full Gram matrix in memory.
  std::size_t max_train_rows = 2000;
  std::uint64_t seed = 0;
};

struct SVMModel {
  std::size_t dim = 0;
  std::vector<double> support_vectors;  // row-major, dim columns
  std::vector<double> alphas;           // 0 < alpha <= C
  std::vector<int> labels;              // -1 / +1
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  bool converged = false;  // KKT violation gap fell below tol
  std::size_t passes = 0;

  std::size_t support_count() const noexcept { return alphas.size(); }
  std::span<const double> support_vector(std::size_t i) const { return {support_vectors.data() + i * dim, dim}; }
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) noexcept;

/// SMO on the RBF-kernel dual with maximal-violating-pair selection. Labels are 0/1 and mapped to -1/+1.
SVMModel svm_fit_smo(const FeatureMatrix& X, std::span<const int> y, const SvmConfig& cfg);

/// sum_i alpha_i y_i K(x_i, x) + b per row.
std::vector<double> svm_decision(const SVMModel& m, const FeatureMatrix& X);
/// 1 where the margin is positive.
std::vector<int> svm_predict(const SVMModel& m, const FeatureMatrix& X);

}  // namespace seizure
