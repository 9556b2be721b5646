#include "seizure/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "seizure/error.hpp"
#include "seizure/preprocess.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seizure::kernels {
namespace {

void check_distance_shapes(std::span<const double> a, std::span<const double> b, std::size_t dim,
                           std::span<const double> out) {
  if (dim == 0 || a.size() % dim != 0 || b.size() % dim != 0) throw ShapeError("distance kernel: bad dimensions");
  if (out.size() != (a.size() / dim) * (b.size() / dim)) throw ShapeError("distance kernel: output size mismatch");
}

void check_gram_shapes(std::span<const double> x, std::size_t dim, std::span<const double> out) {
  if (dim == 0 || x.size() % dim != 0) throw ShapeError("gram kernel: bad dimensions");
  const std::size_t n = x.size() / dim;
  if (out.size() != n * n) throw ShapeError("gram kernel: output size mismatch");
}

std::size_t stats_width(std::span<const Epoch> epochs, bool pooled) {
  if (epochs.empty()) return 0;
  return pooled ? 4 : 4 * epochs.front().samples.size();
}

// Mean, max, min and population std of one sample run, appended at `out`.
struct Moments {
  double sum = 0.0;
  double max = -INFINITY;
  double min = INFINITY;
  std::size_t n = 0;
};

void accumulate(Moments& m, const std::vector<double>& x) noexcept {
  for (double v : x) {
    m.sum += v;
    m.max = std::max(m.max, v);
    m.min = std::min(m.min, v);
  }
  m.n += x.size();
}

double centered_square_sum(const std::vector<double>& x, double mean) noexcept {
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc;
}

void one_epoch(const Epoch& e, bool pooled, double* out) noexcept {
  if (pooled) {
    Moments m;
    for (const auto& ch : e.samples) accumulate(m, ch);
    const double mean = m.sum / static_cast<double>(m.n);
    double ss = 0.0;
    for (const auto& ch : e.samples) ss += centered_square_sum(ch, mean);
    out[0] = mean;
    out[1] = m.max;
    out[2] = m.min;
    out[3] = std::sqrt(ss / static_cast<double>(m.n));
    return;
  }
  for (std::size_t c = 0; c < e.samples.size(); ++c) {
    Moments m;
    accumulate(m, e.samples[c]);
    const double mean = m.sum / static_cast<double>(m.n);
    double* o = out + 4 * c;
    o[0] = mean;
    o[1] = m.max;
    o[2] = m.min;
    o[3] = std::sqrt(centered_square_sum(e.samples[c], mean) / static_cast<double>(m.n));
  }
}

}  // namespace

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void squared_distances(std::span<const double> a, std::span<const double> b, std::size_t dim, std::span<double> out) {
  check_distance_shapes(a, b, dim, out);
  const auto na = static_cast<std::int64_t>(a.size() / dim);
  const std::size_t nb = b.size() / dim;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < na; ++i) {
    const double* ai = a.data() + static_cast<std::size_t>(i) * dim;
    double* row = out.data() + static_cast<std::size_t>(i) * nb;
    for (std::size_t j = 0; j < nb; ++j) row[j] = squared_distance(ai, b.data() + j * dim, dim);
  }
}

void rbf_gram(std::span<const double> x, std::size_t dim, double gamma, std::span<double> out) {
  check_gram_shapes(x, dim, out);
  const std::size_t n = x.size() / dim;
  const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    out[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = std::exp(-gamma * squared_distance(x.data() + i * dim, x.data() + j * dim, dim));
      out[i * n + j] = k;
      out[j * n + i] = k;
    }
  }
}

void epoch_statistics(std::span<const Epoch> epochs, bool pooled, std::span<double> out) {
  const std::size_t width = stats_width(epochs, pooled);
  if (out.size() != epochs.size() * width) throw ShapeError("epoch statistics: output size mismatch");
  const auto n = static_cast<std::int64_t>(epochs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    one_epoch(epochs[static_cast<std::size_t>(i)], pooled, out.data() + static_cast<std::size_t>(i) * width);
  }
}

namespace serial {

void squared_distances(std::span<const double> a, std::span<const double> b, std::size_t dim, std::span<double> out) {
  check_distance_shapes(a, b, dim, out);
  const std::size_t na = a.size() / dim;
  const std::size_t nb = b.size() / dim;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = squared_distance(a.data() + i * dim, b.data() + j * dim, dim);
  }
}

void rbf_gram(std::span<const double> x, std::size_t dim, double gamma, std::span<double> out) {
  check_gram_shapes(x, dim, out);
  const std::size_t n = x.size() / dim;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = i == j ? 1.0 : std::exp(-gamma * squared_distance(x.data() + std::min(i, j) * dim,
                                                                         x.data() + std::max(i, j) * dim, dim));
    }
  }
}

void epoch_statistics(std::span<const Epoch> epochs, bool pooled, std::span<double> out) {
  const std::size_t width = stats_width(epochs, pooled);
  if (out.size() != epochs.size() * width) throw ShapeError("epoch statistics: output size mismatch");
  for (std::size_t i = 0; i < epochs.size(); ++i) one_epoch(epochs[i], pooled, out.data() + i * width);
}

}  // namespace serial
}  // namespace seizure::kernels
