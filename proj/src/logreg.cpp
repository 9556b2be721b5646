#include "seizure/logreg.hpp"

#include <algorithm>
#include <cmath>

#include "seizure/error.hpp"

namespace seizure {
namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// log(1 + e^z), stable for large |z|.
double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_inputs(std::span<const double> weights, const FeatureMatrix& X, std::span<const int> y) {
  check_binary_labels(X, y);
  if (weights.size() != X.cols) {
    throw ShapeError("logistic regression: " + std::to_string(weights.size()) + " weights for " + std::to_string(X.cols) +
                     " columns");
  }
}

std::array<double, 2> effective_weights(const LogRegConfig& cfg, std::span<const int> y) {
  if (!cfg.balanced_weights) return cfg.class_weights;
  const auto pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const auto neg = static_cast<double>(y.size()) - pos;
  const auto n = static_cast<double>(y.size());
  if (pos == 0 || neg == 0) return {1.0, 1.0};
  return {n / (2.0 * neg), n / (2.0 * pos)};
}

}  // namespace

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logreg_loss(std::span<const double> weights, double bias, const FeatureMatrix& X, std::span<const int> y,
                   const std::array<double, 2>& class_weights, double l2_lambda) {
  check_inputs(weights, X, y);
  double total = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double z = dot(weights, X.row(i)) + bias;
    // -[y log s(z) + (1 - y) log(1 - s(z))] = softplus(z) - y z
    total += class_weights[static_cast<std::size_t>(y[i])] * (softplus(z) - y[i] * z);
  }
  const double data = X.rows() == 0 ? 0.0 : total / static_cast<double>(X.rows());
  return data + 0.5 * l2_lambda * dot(weights, weights);
}

std::vector<double> logreg_gradient(std::span<const double> weights, double bias, const FeatureMatrix& X,
                                    std::span<const int> y, const std::array<double, 2>& class_weights, double l2_lambda) {
  check_inputs(weights, X, y);
  const std::size_t d = X.cols;
  std::vector<double> grad(d + 1, 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    const double r = class_weights[static_cast<std::size_t>(y[i])] * (sigmoid(dot(weights, row) + bias) - y[i]);
    for (std::size_t j = 0; j < d; ++j) grad[j] += r * row[j];
    grad[d] += r;
  }
  const double inv_n = X.rows() == 0 ? 0.0 : 1.0 / static_cast<double>(X.rows());
  for (std::size_t j = 0; j < d; ++j) grad[j] = grad[j] * inv_n + l2_lambda * weights[j];
  grad[d] *= inv_n;
  return grad;
}

LogRegModel logreg_fit(const FeatureMatrix& X, std::span<const int> y, const LogRegConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("logistic regression: learning_rate must be positive");
  if (cfg.l2_lambda < 0.0) throw ConfigError("logistic regression: l2_lambda must be nonnegative");
  if (X.empty()) throw DataError("logistic regression: empty training set");
  check_binary_labels(X, y);
  for (double v : X.values) {
    if (!std::isfinite(v)) throw DataError("logistic regression: non-finite feature value");
  }

  LogRegModel m;
  m.config = cfg;
  m.weights.assign(X.cols, 0.0);
  const auto w = effective_weights(cfg, y);
  for (; m.iterations < cfg.max_iters; ++m.iterations) {
    const auto grad = logreg_gradient(m.weights, m.bias, X, y, w, cfg.l2_lambda);
    double norm = 0.0;
    for (double g : grad) norm = std::max(norm, std::abs(g));
    if (norm < cfg.tolerance) {
      m.converged = true;
      break;
    }
    for (std::size_t j = 0; j < X.cols; ++j) m.weights[j] -= cfg.learning_rate * grad[j];
    m.bias -= cfg.learning_rate * grad[X.cols];
  }
  return m;
}

std::vector<double> logreg_predict_proba(const LogRegModel& m, const FeatureMatrix& X) {
  if (X.cols != m.weights.size()) {
    throw ShapeError("logistic regression: matrix has " + std::to_string(X.cols) + " columns, model " +
                     std::to_string(m.weights.size()));
  }
  std::vector<double> p(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) p[i] = sigmoid(dot(m.weights, X.row(i)) + m.bias);
  return p;
}

std::vector<int> logreg_predict(const LogRegModel& m, const FeatureMatrix& X, double threshold) {
  const auto p = logreg_predict_proba(m, X);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
  return out;
}

}  // namespace seizure
