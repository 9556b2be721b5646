#include "seizure/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seizure/error.hpp"
#include "seizure/kernels.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

constexpr double kMinCurvature = 1e-12;  // floor on K_ii + K_jj - 2 K_ij for duplicate rows

std::vector<std::size_t> training_rows(std::size_t n, const SvmConfig& cfg) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (cfg.max_train_rows == 0 || n <= cfg.max_train_rows) return rows;
  Rng rng(derive_seed(cfg.seed, 0));
  for (std::size_t i = 0; i < cfg.max_train_rows; ++i) std::swap(rows[i], rows[i + uniform_index(rng, n - i)]);
  rows.resize(cfg.max_train_rows);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) noexcept {
  return std::exp(-gamma * kernels::squared_distance(a.data(), b.data(), a.size()));
}

SVMModel svm_fit_smo(const FeatureMatrix& X, std::span<const int> y, const SvmConfig& cfg) {
  if (!(cfg.C > 0.0)) throw ConfigError("SVM: C must be positive");
  if (cfg.gamma < 0.0) throw ConfigError("SVM: gamma must be positive");
  if (!(cfg.tol > 0.0)) throw ConfigError("SVM: tol must be positive");
  if (cfg.max_passes == 0) throw ConfigError("SVM: max_passes must be >= 1");
  check_binary_labels(X, y);
  if (X.rows() < 2) throw DataError("SVM: need at least 2 training rows");

  const std::vector<std::size_t> rows = training_rows(X.rows(), cfg);
  const std::size_t n = rows.size();
  const std::size_t d = X.cols;
  std::vector<double> x(n * d);
  std::vector<double> t(n);  // labels as -1 / +1
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(X.row(rows[i]).begin(), d, x.begin() + static_cast<std::ptrdiff_t>(i * d));
    t[i] = y[rows[i]] == 1 ? 1.0 : -1.0;
  }
  if (std::all_of(t.begin(), t.end(), [&](double v) { return v == t[0]; })) {
    throw DataError("SVM: training rows contain a single class");
  }

  SVMModel m;
  m.dim = d;
  m.C = cfg.C;
  m.gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / static_cast<double>(std::max<std::size_t>(d, 1));

  std::vector<double> K(n * n);
  kernels::rbf_gram(x, d, m.gamma, K);

  const double C = cfg.C;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> g(n, 0.0);  // sum_k alpha_k t_k K(k, i), bias excluded
  const std::size_t max_iters = cfg.max_passes * n;

  // Maximal violating pair: i maximises t - g over I_up, j minimises it over
  // I_low; optimal once the gap between the two is below tol.
  auto in_up = [&](std::size_t k) { return t[k] > 0 ? alpha[k] < C : alpha[k] > 0.0; };
  auto in_low = [&](std::size_t k) { return t[k] > 0 ? alpha[k] > 0.0 : alpha[k] < C; };
  double up_max = 0.0, low_min = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    std::size_t i = n, j = n;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = t[k] - g[k];
      if (in_up(k) && (i == n || v > up_max)) {
        i = k;
        up_max = v;
      }
      if (in_low(k) && (j == n || v < low_min)) {
        j = k;
        low_min = v;
      }
    }
    if (i == n || j == n || up_max - low_min < cfg.tol) {
      m.converged = true;
      break;
    }
    if (iter == max_iters) break;

    const double Ei = g[i] - t[i];
    const double Ej = g[j] - t[j];
    const double ai_old = alpha[i];
    const double aj_old = alpha[j];
    double L, H;
    if (t[i] != t[j]) {
      L = std::max(0.0, aj_old - ai_old);
      H = std::min(C, C + aj_old - ai_old);
    } else {
      L = std::max(0.0, ai_old + aj_old - C);
      H = std::min(C, ai_old + aj_old);
    }
    const double Kii = K[i * n + i], Kjj = K[j * n + j], Kij = K[i * n + j];
    const double eta = std::max(Kii + Kjj - 2.0 * Kij, kMinCurvature);
    const double aj = std::clamp(aj_old + t[j] * (Ei - Ej) / eta, L, H);
    const double ai = std::clamp(ai_old + t[i] * t[j] * (aj_old - aj), 0.0, C);

    const double dai = ai - ai_old;
    const double daj = aj - aj_old;
    alpha[i] = ai;
    alpha[j] = aj;
    const double* Ki = K.data() + i * n;
    const double* Kj = K.data() + j * n;
    for (std::size_t k = 0; k < n; ++k) g[k] += t[i] * dai * Ki[k] + t[j] * daj * Kj[k];
  }
  m.passes = (iter + n - 1) / n;

  // Bias from the free support vectors, else the middle of the feasible range.
  double b = 0.0;
  std::size_t free_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (alpha[k] > 0.0 && alpha[k] < C) {
      b += t[k] - g[k];
      ++free_count;
    }
  }
  b = free_count > 0 ? b / static_cast<double>(free_count) : 0.5 * (up_max + low_min);

  m.bias = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] <= 0.0) continue;
    m.alphas.push_back(alpha[i]);
    m.labels.push_back(t[i] > 0 ? 1 : -1);
    m.support_vectors.insert(m.support_vectors.end(), x.begin() + static_cast<std::ptrdiff_t>(i * d),
                             x.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  }
  return m;
}

std::vector<double> svm_decision(const SVMModel& m, const FeatureMatrix& X) {
  if (X.cols != m.dim) throw ShapeError("SVM: column count mismatch");
  std::vector<double> out(X.rows());
  const auto n = static_cast<std::int64_t>(X.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    const auto row = X.row(static_cast<std::size_t>(r));
    double s = m.bias;
    for (std::size_t i = 0; i < m.alphas.size(); ++i) s += m.alphas[i] * m.labels[i] * rbf_kernel(m.support_vector(i), row, m.gamma);
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

std::vector<int> svm_predict(const SVMModel& m, const FeatureMatrix& X) {
  const auto margins = svm_decision(m, X);
  std::vector<int> out(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) out[i] = margins[i] > 0.0 ? 1 : 0;
  return out;
}

}  // namespace seizure
