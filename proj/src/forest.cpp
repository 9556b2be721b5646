#include "seizure/forest.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "seizure/error.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

// Sum over classes of count^2 / n for both children. Maximising it minimises
// the weighted Gini impurity, and the comparison stays well conditioned for
// nodes with very skewed class counts.
double purity_score(double l0, double l1, double r0, double r1) noexcept {
  const double nl = l0 + l1;
  const double nr = r0 + r1;
  return (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr;
}

class Splitter {
 public:
  std::optional<Split> find(const FeatureMatrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                            std::span<const std::size_t> features) {
    const std::size_t n = rows.size();
    if (n < 2) return std::nullopt;
    std::array<double, 2> parent{0.0, 0.0};
    for (std::size_t r : rows) parent[static_cast<std::size_t>(y[r])] += 1.0;
    if (parent[0] == 0.0 || parent[1] == 0.0) return std::nullopt;

    const double total = static_cast<double>(n);
    const double parent_score = (parent[0] * parent[0] + parent[1] * parent[1]) / total;
    double best_score = parent_score * (1.0 + 1e-12);
    std::optional<Split> best;

    values_.resize(n);
    for (std::size_t f : features) {
      for (std::size_t i = 0; i < n; ++i) values_[i] = {X.values[rows[i] * X.cols + f], y[rows[i]]};
      std::sort(values_.begin(), values_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        (values_[i].second == 0 ? l0 : l1) += 1.0;
        if (values_[i].first == values_[i + 1].first) continue;
        const double score = purity_score(l0, l1, parent[0] - l0, parent[1] - l1);
        if (score > best_score) {
          best_score = score;
          const double lo = values_[i].first;
          const double hi = values_[i + 1].first;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = Split{f, mid, 0.0};
        }
      }
    }
    if (best) best->gini_gain = (best_score - parent_score) / total;
    return best;
  }

 private:
  std::vector<std::pair<double, int>> values_;
};

std::size_t resolve_max_features(const ForestConfig& cfg, std::size_t d) {
  if (cfg.max_features > 0) return std::min(cfg.max_features, d);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

}  // namespace

double gini(std::size_t n0, std::size_t n1) noexcept {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0.0) return 0.0;
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

std::optional<Split> best_split(const FeatureMatrix& X, std::span<const int> y, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features) {
  check_binary_labels(X, y);
  for (std::size_t f : candidate_features) {
    if (f >= X.cols) throw ShapeError("best_split: feature index out of range");
  }
  Splitter s;
  return s.find(X, y, rows, candidate_features);
}

std::optional<Split> best_split(const FeatureMatrix& X, std::span<const int> y,
                                std::span<const std::size_t> candidate_features) {
  std::vector<std::size_t> rows(X.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return best_split(X, y, rows, candidate_features);
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

int DecisionTree::predict(std::span<const double> x) const {
  const TreeNode& leaf = leaf_for(x);
  return leaf.counts[1] > leaf.counts[0] ? 1 : 0;
}

DecisionTree grow_tree(const FeatureMatrix& X, std::span<const int> y, std::vector<std::size_t> rows,
                       const ForestConfig& cfg, std::uint64_t seed) {
  if (rows.empty()) throw DataError("decision tree: no training rows");
  const std::size_t d = X.cols;
  const std::size_t mf = resolve_max_features(cfg, d);
  Rng rng(seed);
  Splitter splitter;
  std::vector<std::size_t> features(d);
  for (std::size_t j = 0; j < d; ++j) features[j] = j;

  struct Pending {
    int node;
    std::size_t begin, end, depth;
  };
  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<Pending> stack{{0, 0, rows.size(), 0}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const std::span<const std::size_t> node_rows(rows.data() + p.begin, p.end - p.begin);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
    for (std::size_t r : node_rows) ++node.counts[static_cast<std::size_t>(y[r])];

    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    const bool depth_capped = cfg.max_depth > 0 && p.depth >= cfg.max_depth;
    if (pure || depth_capped || node_rows.size() < cfg.min_samples_split) continue;

    // Partial Fisher-Yates: the first mf entries become this node's candidates.
    for (std::size_t i = 0; i < mf; ++i) std::swap(features[i], features[i + uniform_index(rng, d - i)]);
    const auto split = splitter.find(X, y, node_rows, std::span(features).first(mf));
    if (!split) continue;

    const auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(p.begin),
                                    rows.begin() + static_cast<std::ptrdiff_t>(p.end), [&](std::size_t r) {
                                      return X.values[r * d + split->feature] <= split->threshold;
                                    });
    const auto split_at = static_cast<std::size_t>(mid - rows.begin());
    const int left = static_cast<int>(tree.nodes.size());
    const int right = left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(p.node)];  // re-fetch after growth
    parent.feature = static_cast<int>(split->feature);
    parent.threshold = split->threshold;
    parent.left = left;
    parent.right = right;
    stack.push_back({right, split_at, p.end, p.depth + 1});
    stack.push_back({left, p.begin, split_at, p.depth + 1});
  }
  return tree;
}

std::vector<std::size_t> rf_bootstrap_rows(std::size_t n, const ForestConfig& cfg, std::size_t t) {
  std::vector<std::size_t> rows(n);
  if (!cfg.bootstrap) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
  }
  Rng rng(derive_seed(derive_seed(cfg.seed, t), 0));
  for (auto& r : rows) r = uniform_index(rng, n);
  return rows;
}

RFModel rf_fit(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& cfg) {
  if (cfg.n_trees == 0) throw ConfigError("random forest: n_trees must be >= 1");
  if (cfg.min_samples_split < 2) throw ConfigError("random forest: min_samples_split must be >= 2");
  if (X.empty()) throw DataError("random forest: empty training set");
  check_binary_labels(X, y);

  RFModel m;
  m.config = cfg;
  m.n_features = X.cols;
  m.trees.resize(cfg.n_trees);
  const auto n_trees = static_cast<std::int64_t>(cfg.n_trees);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t t = 0; t < n_trees; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    m.trees[ut] = grow_tree(X, y, rf_bootstrap_rows(X.rows(), cfg, ut), cfg, derive_seed(derive_seed(cfg.seed, ut), 1));
  }
  return m;
}

std::vector<double> rf_scores(const RFModel& m, const FeatureMatrix& X) {
  if (X.cols != m.n_features) throw ShapeError("random forest: column count mismatch");
  std::vector<double> out(X.rows());
  const auto n = static_cast<std::int64_t>(X.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto row = X.row(static_cast<std::size_t>(i));
    std::size_t votes = 0;
    for (const DecisionTree& t : m.trees) votes += static_cast<std::size_t>(t.predict(row));
    out[static_cast<std::size_t>(i)] = static_cast<double>(votes) / static_cast<double>(m.trees.size());
  }
  return out;
}

std::vector<int> rf_predict(const RFModel& m, const FeatureMatrix& X) {
  const auto scores = rf_scores(m, X);
  std::vector<int> out(scores.size());
  // Strict majority of votes for class 1; ties fall to class 0.
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > 0.5 ? 1 : 0;
  return out;
}

}  // namespace seizure
