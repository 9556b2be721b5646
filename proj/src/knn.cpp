#include "seizure/knn.hpp"

#include <algorithm>
#include <cstdint>

#include "seizure/error.hpp"
#include "seizure/kernels.hpp"

namespace seizure {
namespace {

constexpr std::size_t kQueryBlock = 64;

struct Vote {
  double score = 0.0;
  int label = 0;
};

Vote vote(const double* dist, std::size_t n, std::span<const int> y, std::size_t k, const std::array<double, 2>& w,
          std::vector<std::size_t>& order) {
  order.resize(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  std::array<double, 2> votes{0.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) votes[static_cast<std::size_t>(y[order[i]])] += w[static_cast<std::size_t>(y[order[i]])];
  Vote v;
  v.score = votes[1] / (votes[0] + votes[1]);
  if (votes[1] > votes[0]) v.label = 1;
  else if (votes[0] > votes[1]) v.label = 0;
  else v.label = y[order[0]];
  return v;
}

void check_k(std::size_t k, std::size_t n) {
  if (n == 0) throw DataError("KNN: empty training set");
  if (k == 0 || k > n) throw ConfigError("KNN: k must be in [1, " + std::to_string(n) + "], got " + std::to_string(k));
}

std::vector<Vote> vote_all(const KnnModel& m, const FeatureMatrix& queries) {
  if (queries.cols != m.X.cols) {
    throw ShapeError("KNN: query has " + std::to_string(queries.cols) + " columns, model " + std::to_string(m.X.cols));
  }
  const std::size_t n = m.X.rows();
  std::vector<Vote> out(queries.rows());
  std::vector<double> dist;
  for (std::size_t first = 0; first < queries.rows(); first += kQueryBlock) {
    const std::size_t rows = std::min(kQueryBlock, queries.rows() - first);
    dist.resize(rows * n);
    kernels::squared_distances(std::span(queries.values).subspan(first * queries.cols, rows * queries.cols), m.X.values,
                               m.X.cols, dist);
    const auto srows = static_cast<std::int64_t>(rows);
#pragma omp parallel
    {
      std::vector<std::size_t> order;
#pragma omp for schedule(static)
      for (std::int64_t r = 0; r < srows; ++r) {
        const auto ur = static_cast<std::size_t>(r);
        out[first + ur] = vote(dist.data() + ur * n, n, m.y, m.config.k, m.class_weights, order);
      }
    }
  }
  return out;
}

}  // namespace

int knn_classify(const FeatureMatrix& train_X, std::span<const int> train_y, std::span<const double> query, std::size_t k) {
  check_binary_labels(train_X, train_y);
  check_k(k, train_X.rows());
  if (query.size() != train_X.cols) throw ShapeError("KNN: query dimension mismatch");
  std::vector<double> dist(train_X.rows());
  for (std::size_t j = 0; j < dist.size(); ++j) dist[j] = kernels::squared_distance(query.data(), train_X.row(j).data(), train_X.cols);
  std::vector<std::size_t> order;
  return vote(dist.data(), dist.size(), train_y, k, {1.0, 1.0}, order).label;
}

KnnModel knn_fit(FeatureMatrix X, std::vector<int> y, const KnnConfig& cfg) {
  check_binary_labels(X, y);
  check_k(cfg.k, X.rows());
  KnnModel m{std::move(X), std::move(y), cfg, {1.0, 1.0}};
  if (cfg.balanced_weights) {
    const auto pos = static_cast<double>(std::count(m.y.begin(), m.y.end(), 1));
    const auto neg = static_cast<double>(m.y.size()) - pos;
    const auto n = static_cast<double>(m.y.size());
    if (pos > 0 && neg > 0) m.class_weights = {n / (2.0 * neg), n / (2.0 * pos)};
  }
  return m;
}

std::vector<double> knn_scores(const KnnModel& m, const FeatureMatrix& queries) {
  const auto votes = vote_all(m, queries);
  std::vector<double> out(votes.size());
  std::transform(votes.begin(), votes.end(), out.begin(), [](const Vote& v) { return v.score; });
  return out;
}

std::vector<int> knn_predict(const KnnModel& m, const FeatureMatrix& queries) {
  const auto votes = vote_all(m, queries);
  std::vector<int> out(votes.size());
  std::transform(votes.begin(), votes.end(), out.begin(), [](const Vote& v) { return v.label; });
  return out;
}

}  // namespace seizure
