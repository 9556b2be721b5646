#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "seizure/error.hpp"
#include "seizure/forest.hpp"
#include "seizure/knn.hpp"
#include "seizure/logreg.hpp"
#include "seizure/svm.hpp"

using namespace seizure;

namespace {

const FeatureMatrix kXor = FeatureMatrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
const std::vector<int> kXorY{0, 0, 1, 1};

double accuracy(std::span<const int> a, std::span<const int> b) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

Dataset two_blobs(Rng& rng, std::size_t n, std::size_t d, double gap) {
  Dataset data;
  data.X = FeatureMatrix(d);
  std::normal_distribution<double> noise;
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 3 == 0 ? 1 : 0;
    for (double& v : row) v = noise(rng) + (label ? gap : 0.0);
    data.X.append_row(row);
    data.y.push_back(label);
  }
  return data;
}

}  // namespace

TEST_CASE("knn: spec examples") {
  const FeatureMatrix X = FeatureMatrix::from_rows({{0, 0}, {1, 1}, {10, 10}});
  const std::vector<int> y{0, 0, 1};
  const std::vector<double> q{0.1, 0.1};
  CHECK(knn_classify(X, y, q, 2) == 0);

  const FeatureMatrix X2 = FeatureMatrix::from_rows({{0, 0}, {3, 0}, {100, 0}});
  const std::vector<int> y2{1, 0, 0};
  const std::vector<double> q2{1, 0};
  CHECK(knn_classify(X2, y2, q2, 2) == 1);  // 1-1 vote, nearest is class 1

  const std::vector<double> exact{10, 10};
  CHECK(knn_classify(X, y, exact, 1) == 1);
}

TEST_CASE("knn: agrees with brute-force ranking and is permutation invariant") {
  Rng rng(8);
  const Dataset train = oracle::random_dataset(rng, 60, 3, 20);
  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Dataset shuffled = train.select(perm);
  const KnnModel a = knn_fit(train.X, train.y, KnnConfig{5});
  const KnnModel b = knn_fit(shuffled.X, shuffled.y, KnnConfig{5});
  const Dataset queries = oracle::random_dataset(rng, 40, 3, 0);
  const auto pa = knn_predict(a, queries.X);
  CHECK(pa == knn_predict(b, queries.X));
  for (std::size_t q = 0; q < queries.X.rows(); ++q) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < train.X.rows(); ++i) {
      dist.emplace_back(kernels::squared_distance(train.X.row(i).data(), queries.X.row(q).data(), 3), i);
    }
    std::sort(dist.begin(), dist.end());
    int votes = 0;
    for (int j = 0; j < 5; ++j) votes += train.y[dist[j].second];
    CHECK(pa[q] == (votes >= 3 ? 1 : 0));
  }
}

TEST_CASE("knn: balanced weights favour the rare class") {
  const FeatureMatrix X = FeatureMatrix::from_rows({{0}, {1}, {2}, {3}, {4}, {5}, {1.5}});
  const std::vector<int> y{0, 0, 0, 0, 0, 0, 1};
  const std::vector<double> q{1.6};
  const KnnModel plain = knn_fit(X, y, KnnConfig{3, false});
  const KnnModel balanced = knn_fit(X, y, KnnConfig{3, true});
  const FeatureMatrix Q = FeatureMatrix::from_rows({{1.6}});
  CHECK(knn_predict(plain, Q)[0] == 0);
  CHECK(knn_predict(balanced, Q)[0] == 1);
  CHECK_THROWS_AS(knn_fit(X, y, KnnConfig{0}), ConfigError);
}

TEST_CASE("logreg: zero iterations predicts 0.5") {
  Rng rng(1);
  const Dataset d = oracle::random_dataset(rng, 20, 3, 5);
  LogRegConfig cfg;
  cfg.max_iters = 0;
  const LogRegModel m = logreg_fit(d.X, d.y, cfg);
  for (double w : m.weights) CHECK(w == 0.0);
  for (double p : logreg_predict_proba(m, d.X)) CHECK(p == 0.5);
}

TEST_CASE("logreg: separable 1-D data reaches accuracy 1") {
  const FeatureMatrix X = FeatureMatrix::from_rows({{-1}, {-1}, {1}, {1}, {-1}, {1}});
  const std::vector<int> y{0, 0, 1, 1, 0, 1};
  LogRegConfig cfg;
  cfg.l2_lambda = 0.0;
  CHECK(logreg_predict(logreg_fit(X, y, cfg), X) == y);
}

TEST_CASE("logreg: sigmoid saturates without overflow") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(1.0 - sigmoid(50.0) < 1e-20);
  CHECK(sigmoid(-50.0) > 0.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(std::isfinite(sigmoid(-1e308)));
}

TEST_CASE("logreg: analytic gradient matches central differences") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 15, 4, 6);
    std::vector<double> w(4);
    for (double& v : w) v = uniform01(rng) - 0.5;
    const double b = uniform01(rng) - 0.5;
    const std::array<double, 2> cw{1.0, 1.0 + 3.0 * uniform01(rng)};
    const double lambda = 0.1 * uniform01(rng);
    const auto g = logreg_gradient(w, b, d.X, d.y, cw, lambda);
    const double eps = 1e-5;
    double worst = 0.0;
    for (std::size_t j = 0; j <= 4; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < 4) {
        wp[j] += eps;
        wm[j] -= eps;
      } else {
        bp += eps;
        bm -= eps;
      }
      const double fd = (logreg_loss(wp, bp, d.X, d.y, cw, lambda) - logreg_loss(wm, bm, d.X, d.y, cw, lambda)) / (2 * eps);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(1e-8, std::abs(fd) + std::abs(g[j])));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("logreg: probabilities are monotone in the margin") {
  Rng rng(3);
  const Dataset d = oracle::random_dataset(rng, 50, 3, 20);
  const LogRegModel m = logreg_fit(d.X, d.y, LogRegConfig{});
  const auto p = logreg_predict_proba(m, d.X);
  std::vector<std::pair<double, double>> zp;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double z = m.bias;
    for (std::size_t j = 0; j < 3; ++j) z += m.weights[j] * d.X.row(i)[j];
    zp.emplace_back(z, p[i]);
  }
  std::sort(zp.begin(), zp.end());
  for (std::size_t i = 1; i < zp.size(); ++i) CHECK(zp[i].second >= zp[i - 1].second);
}

TEST_CASE("logreg: loss is non-increasing over iterations") {
  Rng rng(4);
  const Dataset d = two_blobs(rng, 80, 3, 1.0);
  LogRegConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.tolerance = 0.0;
  double prev = INFINITY;
  for (std::size_t it = 0; it <= 40; it += 4) {
    cfg.max_iters = it;
    const LogRegModel m = logreg_fit(d.X, d.y, cfg);
    const double loss = logreg_loss(m.weights, m.bias, d.X, d.y, cfg.class_weights, cfg.l2_lambda);
    CHECK(loss <= prev);
    prev = loss;
  }
}

TEST_CASE("logreg: XOR stays at or below 75%") {
  const LogRegModel m = logreg_fit(kXor, kXorY, LogRegConfig{});
  CHECK(accuracy(logreg_predict(m, kXor), kXorY) <= 0.75);
}

TEST_CASE("gini and best split") {
  CHECK(gini(2, 2) == 0.5);
  CHECK(gini(4, 0) == 0.0);
  const FeatureMatrix X = FeatureMatrix::from_rows({{1}, {2}, {3}, {4}});
  const std::vector<std::size_t> features{0};
  const auto s = best_split(X, std::vector<int>{0, 0, 1, 1}, features);
  REQUIRE(s.has_value());
  CHECK(s->threshold == 2.5);
  CHECK(s->gini_gain == 0.5);
  CHECK_FALSE(best_split(X, std::vector<int>{1, 1, 1, 1}, features).has_value());
}

TEST_CASE("best split agrees with enumerating every threshold") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset d = oracle::random_dataset(rng, 12, 2, 5);
    std::vector<int> y = d.y;
    std::shuffle(y.begin(), y.end(), rng);
    const std::vector<std::size_t> features{0, 1};
    const auto s = best_split(d.X, y, features);
    double best = 0.0;
    for (std::size_t f = 0; f < 2; ++f) {
      for (std::size_t t = 0; t < 12; ++t) {
        const double thr = d.X.row(t)[f];
        std::size_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
        for (std::size_t i = 0; i < 12; ++i) {
          const bool left = d.X.row(i)[f] <= thr;
          (left ? (y[i] ? l1 : l0) : (y[i] ? r1 : r0))++;
        }
        if (l0 + l1 == 0 || r0 + r1 == 0) continue;
        const double gain = gini(5, 7) - ((l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1)) / 12.0;
        best = std::max(best, gain);
      }
    }
    REQUIRE(s.has_value());
    CHECK(s->gini_gain == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("a single unlimited tree memorizes its bootstrap sample") {
  Rng rng(6);
  const Dataset d = oracle::random_dataset(rng, 80, 3, 30);
  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.max_features = 3;
  cfg.seed = 9;
  const RFModel m = rf_fit(d.X, d.y, cfg);
  for (std::size_t r : rf_bootstrap_rows(80, cfg, 0)) CHECK(m.trees[0].predict(d.X.row(r)) == d.y[r]);
}

TEST_CASE("forest: majority vote and determinism") {
  Rng rng(7);
  const Dataset d = two_blobs(rng, 120, 4, 2.0);
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.seed = 3;
  const RFModel a = rf_fit(d.X, d.y, cfg);
  const RFModel b = rf_fit(d.X, d.y, cfg);
  CHECK(a == b);
  const auto scores = rf_scores(a, d.X);
  const auto pred = rf_predict(a, d.X);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    int votes = 0;
    for (const DecisionTree& t : a.trees) votes += t.predict(d.X.row(i));
    CHECK(pred[i] == (2 * votes > 5 ? 1 : 0));
    CHECK(scores[i] == votes / 5.0);
  }
  cfg.seed = 4;
  CHECK_FALSE(rf_fit(d.X, d.y, cfg) == a);
}

TEST_CASE("forest: depth limit bounds the tree") {
  Rng rng(8);
  const Dataset d = oracle::random_dataset(rng, 100, 3, 40);
  ForestConfig cfg;
  cfg.n_trees = 3;
  cfg.max_depth = 1;
  for (const DecisionTree& t : rf_fit(d.X, d.y, cfg).trees) CHECK(t.nodes.size() <= 3);
}

TEST_CASE("svm: kernel and decision examples") {
  const std::vector<double> x{0.3, -2.0};
  CHECK(rbf_kernel(x, x, 0.7) == 1.0);
  SVMModel m;
  m.dim = 2;
  m.support_vectors = x;
  m.alphas = {1.0};
  m.labels = {1};
  m.gamma = 1.0;
  const FeatureMatrix Q = FeatureMatrix::from_rows({{0.3, -2.0}});
  CHECK(svm_decision(m, Q)[0] == 1.0);
  CHECK(svm_predict(m, Q)[0] == 1);
}

TEST_CASE("svm: XOR is separated and KKT conditions hold") {
  SvmConfig cfg;
  cfg.C = 10.0;
  cfg.gamma = 1.0;
  const SVMModel m = svm_fit_smo(kXor, kXorY, cfg);
  CHECK(accuracy(svm_predict(m, kXor), kXorY) == 1.0);
  CHECK(m.converged);
  double balance = 0.0;
  for (std::size_t i = 0; i < m.support_count(); ++i) {
    CHECK(m.alphas[i] >= 0.0);
    CHECK(m.alphas[i] <= cfg.C);
    balance += m.alphas[i] * m.labels[i];
  }
  CHECK(std::abs(balance) < 1e-6);
}

TEST_CASE("svm: free support vectors sit on the margin") {
  Rng rng(9);
  const Dataset d = two_blobs(rng, 90, 2, 1.5);
  SvmConfig cfg;
  cfg.C = 1.0;
  cfg.tol = 1e-4;
  cfg.max_passes = 500;
  const SVMModel m = svm_fit_smo(d.X, d.y, cfg);
  REQUIRE(m.converged);
  FeatureMatrix sv(2);
  for (std::size_t i = 0; i < m.support_count(); ++i) sv.append_row(m.support_vector(i));
  const auto margin = svm_decision(m, sv);
  double balance = 0.0;
  for (std::size_t i = 0; i < m.support_count(); ++i) {
    balance += m.alphas[i] * m.labels[i];
    if (m.alphas[i] < cfg.C - 1e-9) CHECK(std::abs(m.labels[i] * margin[i] - 1.0) < cfg.tol);
  }
  CHECK(std::abs(balance) < 1e-6);
}

TEST_CASE("svm: bad configuration") {
  SvmConfig cfg;
  cfg.C = 0.0;
  CHECK_THROWS_AS(svm_fit_smo(kXor, kXorY, cfg), ConfigError);
}
