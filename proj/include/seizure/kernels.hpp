#pragma once

// Data-parallel inner loops. Each kernel has a serial reference in
// kernels::serial; the OpenMP versions assign every output element to exactly
// one thread and evaluate it with the same operation order, so the two agree
// bit for bit.

#include <cstddef>
#include <span>

namespace seizure {
struct Epoch;
}

namespace seizure::kernels {

/// Squared Euclidean distance between two rows of length `dim`.
inline double squared_distance(const double* a, const double* b, std::size_t dim) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

/// out[i * nb + j] = ||a_i - b_j||^2 for row-major a (na x dim), b (nb x dim).
void squared_distances(std::span<const double> a, std::span<const double> b, std::size_t dim, std::span<double> out);

/// out[i * n + j] = exp(-gamma ||x_i - x_j||^2), n = x.size() / dim.
void rbf_gram(std::span<const double> x, std::size_t dim, double gamma, std::span<double> out);

/// Per-epoch (mean, max, min, population std); one output row per epoch with
/// 4 values per channel, or 4 values total when `pooled`.
void epoch_statistics(std::span<const Epoch> epochs, bool pooled, std::span<double> out);

/// Worker threads the parallel kernels may use (1 without OpenMP).
int max_threads() noexcept;

namespace serial {

void squared_distances(std::span<const double> a, std::span<const double> b, std::size_t dim, std::span<double> out);
void rbf_gram(std::span<const double> x, std::size_t dim, double gamma, std::span<double> out);
void epoch_statistics(std::span<const Epoch> epochs, bool pooled, std::span<double> out);

}  // namespace serial
}  // namespace seizure::kernels
