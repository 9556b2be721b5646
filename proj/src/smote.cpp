#include "seizure/smote.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "seizure/error.hpp"
#include "seizure/kernels.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

constexpr std::size_t kDistanceBlockRows = 256;

// k nearest minority neighbours of every minority row (by position in
// `members`), ties broken by lower row index.
std::vector<std::vector<std::size_t>> minority_neighbours(const FeatureMatrix& X, const std::vector<std::size_t>& members,
                                                          std::size_t k) {
  const std::size_t m = members.size();
  const std::size_t d = X.cols;
  std::vector<double> packed(m * d);
  for (std::size_t i = 0; i < m; ++i) std::copy_n(X.row(members[i]).begin(), d, packed.begin() + static_cast<std::ptrdiff_t>(i * d));

  std::vector<std::vector<std::size_t>> neighbours(m);
  std::vector<double> block;
  std::vector<std::size_t> order(m);
  for (std::size_t first = 0; first < m; first += kDistanceBlockRows) {
    const std::size_t rows = std::min(kDistanceBlockRows, m - first);
    block.resize(rows * m);
    kernels::squared_distances(std::span(packed).subspan(first * d, rows * d), packed, d, block);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t i = first + r;
      const double* dist = block.data() + r * m;
      order.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) order.push_back(j);
      }
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                        [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
      neighbours[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  return neighbours;
}

}  // namespace

SmoteResult smote(const FeatureMatrix& X, std::span<const int> y, const SmoteConfig& cfg) {
  return smote(X, y, cfg, nullptr);
}

SmoteResult smote(const FeatureMatrix& X, std::span<const int> y, const SmoteConfig& cfg, const LambdaSource& lambda) {
  check_binary_labels(X, y);
  if (cfg.k_neighbors < 1) throw ConfigError("SMOTE k_neighbors must be >= 1");
  if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0)) throw ConfigError("SMOTE target_ratio must be in (0, 1]");
  for (const RowMeta& m : X.meta) {
    if (m.split == SplitTag::validation || m.split == SplitTag::test) {
      throw DataError("SMOTE refused: row of patient '" + m.patient + "' is tagged as evaluation data");
    }
  }

  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t negatives = y.size() - positives;
  SmoteResult out;
  out.minority_class = positives <= negatives ? 1 : 0;
  const std::size_t minority = std::min(positives, negatives);
  const std::size_t majority = std::max(positives, negatives);
  if (minority < 2) {
    throw DataError("SMOTE needs at least 2 minority samples, found " + std::to_string(minority));
  }

  out.k_used = cfg.k_neighbors;
  if (cfg.k_neighbors >= minority) {
    out.k_used = minority - 1;
    out.warnings.push_back("SMOTE k_neighbors=" + std::to_string(cfg.k_neighbors) + " >= minority count " +
                           std::to_string(minority) + "; using k=" + std::to_string(out.k_used));
  }

  const auto target = static_cast<std::size_t>(std::floor(cfg.target_ratio * static_cast<double>(majority)));
  const std::size_t n_new = target > minority ? target - minority : 0;

  out.X = X;
  out.y.assign(y.begin(), y.end());
  out.synthetic_count = n_new;
  if (n_new == 0) return out;

  std::vector<std::size_t> members;
  members.reserve(minority);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == out.minority_class) members.push_back(i);
  }
  const auto neighbours = minority_neighbours(X, members, out.k_used);

  const std::size_t d = X.cols;
  const std::size_t base_rows = X.rows();
  out.X.values.resize((base_rows + n_new) * d);
  out.X.meta.resize(base_rows + n_new);
  out.y.resize(base_rows + n_new, out.minority_class);
  out.provenance.resize(n_new);

  std::vector<double> lambdas(n_new);
  if (lambda) {
    for (std::size_t s = 0; s < n_new; ++s) {
      lambdas[s] = lambda(s);
      if (!(lambdas[s] >= 0.0 && lambdas[s] <= 1.0)) throw ConfigError("SMOTE interpolation weight outside [0, 1]");
    }
  }

  const auto count = static_cast<std::int64_t>(n_new);
#pragma omp parallel for schedule(static)
  for (std::int64_t si = 0; si < count; ++si) {
    const auto s = static_cast<std::size_t>(si);
    Rng rng(derive_seed(cfg.seed, s));
    const std::size_t base_pos = s % minority;
    const std::size_t nn_pos = neighbours[base_pos][uniform_index(rng, out.k_used)];
    const double lam = lambda ? lambdas[s] : uniform01(rng);

    const auto src = X.row(members[base_pos]);
    const auto nn = X.row(members[nn_pos]);
    double* dst = out.X.values.data() + (base_rows + s) * d;
    for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] + lam * (nn[j] - src[j]);

    RowMeta meta = X.meta[members[base_pos]];
    meta.synthetic = true;
    out.X.meta[base_rows + s] = std::move(meta);
    out.provenance[s] = {members[base_pos], members[nn_pos]};
  }
  return out;
}

}  // namespace seizure
