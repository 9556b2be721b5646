#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "seizure/error.hpp"
#include "seizure/lstm.hpp"

using namespace seizure;

namespace {

constexpr double kNoClip = std::numeric_limits<double>::infinity();

LstmTrainConfig toy_config(std::uint64_t seed) {
  LstmTrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.learning_rate = 0.1;
  cfg.epochs = 200;
  cfg.batch_size = 4;
  cfg.patience = 0;
  cfg.seed = seed;
  return cfg;
}

double train_accuracy(const LstmParams& p, const SequenceSet& s) {
  const auto pred = lstm_predict(p, s);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < s.size(); ++i) hit += pred.classes[i] == s.labels[i];
  return static_cast<double>(hit) / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("zero parameters: gates at 0.5, cell and hidden stay 0, output 0.5") {
  const LstmParams p = LstmParams::zeros(3, 4);
  Rng rng(1);
  const SequenceSet s = oracle::random_sequences(rng, 1, 5, 3);
  const LstmTrace tr = lstm_forward(p, s.sequences[0]);
  CHECK(tr.steps == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t k = 0; k < 12; ++k) CHECK(tr.gates[t * 16 + k] == 0.5);
    for (std::size_t k = 12; k < 16; ++k) CHECK(tr.gates[t * 16 + k] == 0.0);
  }
  for (double h : tr.hidden) CHECK(h == 0.0);
  CHECK(tr.probability == 0.5);
}

TEST_CASE("d = h = 1 with only b_out = 2 gives sigmoid(2)") {
  LstmParams p = LstmParams::zeros(1, 1);
  p.b_out() = 2.0;
  const std::vector<double> seq{0.3, -1.2, 4.0};
  CHECK(lstm_probability(p, seq) == doctest::Approx(0.880797).epsilon(1e-6));
  CHECK(lstm_probability(p, seq) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
}

TEST_CASE("single step matches a hand-computed cell") {
  LstmParams p = LstmParams::zeros(1, 1);
  // W rows: i, f, o, g; columns [x, h].
  p.W()[0] = 0.5;
  p.W()[4] = -1.0;
  p.W()[6] = 2.0;
  p.b()[1] = 0.3;
  p.w_out()[0] = 1.5;
  p.b_out() = -0.2;
  const std::vector<double> x{0.8};
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  const double i = sig(0.4), o = sig(-0.8), g = std::tanh(1.6);
  const double c = i * g;
  const double h = o * std::tanh(c);
  CHECK(lstm_probability(p, x) == doctest::Approx(sig(1.5 * h - 0.2)).epsilon(1e-14));
}

TEST_CASE("forward pass is deterministic and bounded") {
  Rng rng(2);
  const LstmParams p = LstmParams::init(3, 4, 5);
  SequenceSet s = oracle::random_sequences(rng, 20, 6, 3);
  for (auto& seq : s.sequences) {
    for (double& v : seq) v *= 50.0;
  }
  for (const auto& seq : s.sequences) {
    const LstmTrace a = lstm_forward(p, seq);
    const LstmTrace b = lstm_forward(p, seq);
    CHECK(a.probability == b.probability);
    CHECK(a.hidden == b.hidden);
    for (double g : a.gates) CHECK((g >= -1.0 && g <= 1.0));
    for (std::size_t t = 0; t < a.steps; ++t) {
      for (std::size_t k = 0; k < 12; ++k) CHECK((a.gates[t * 16 + k] >= 0.0 && a.gates[t * 16 + k] <= 1.0));
    }
    for (double tc : a.tanh_c) CHECK(std::abs(tc) <= 1.0);
  }
}

TEST_CASE("BPTT gradient matches central differences on d=3, h=4, T=5") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    const SequenceSet s = oracle::random_sequences(rng, 3, 5, 3);
    const LstmParams p = LstmParams::init(3, 4, seed);
    const std::vector<std::size_t> batch{0, 1, 2};
    CHECK(oracle::lstm_gradient_error(p, s, batch) < 1e-4);
  }
}

TEST_CASE("gradient of a duplicated batch equals the singleton gradient") {
  Rng rng(3);
  const SequenceSet s = oracle::random_sequences(rng, 2, 4, 2);
  const LstmParams p = LstmParams::init(2, 3, 1);
  const std::vector<std::size_t> one{1};
  const std::vector<std::size_t> three{1, 1, 1};
  const auto a = lstm_grad(p, s, one, kNoClip);
  const auto b = lstm_grad(p, s, three, kNoClip);
  for (std::size_t k = 0; k < a.grad.values.size(); ++k) CHECK(b.grad.values[k] == doctest::Approx(a.grad.values[k]).epsilon(1e-12));
  CHECK_THROWS_AS(lstm_grad(p, s, std::vector<std::size_t>{}, kNoClip), DataError);
}

TEST_CASE("clipping rescales to the clip norm") {
  Rng rng(4);
  const SequenceSet s = oracle::random_sequences(rng, 4, 4, 2);
  const LstmParams p = LstmParams::init(2, 3, 2);
  const std::vector<std::size_t> batch{0, 1, 2, 3};
  const auto raw = lstm_grad(p, s, batch, kNoClip);
  const double limit = raw.norm / 4.0;
  const auto clipped = lstm_grad(p, s, batch, limit);
  CHECK(clipped.clipped);
  double norm = 0.0;
  for (double g : clipped.grad.values) norm += g * g;
  CHECK(std::sqrt(norm) == doctest::Approx(limit).epsilon(1e-12));
  CHECK(clipped.grad.values[0] == doctest::Approx(raw.grad.values[0] / 4.0).epsilon(1e-12));
}

TEST_CASE("toy set is memorized within 200 epochs") {
  const SequenceSet toy = oracle::toy_sequences(7);
  const LstmTrainResult r = lstm_train(toy, SequenceSet{}, toy_config(1));
  CHECK(train_accuracy(r.params, toy) >= 0.95);
}

TEST_CASE("training loss drops by at least half") {
  const SequenceSet toy = oracle::toy_sequences(8);
  const LstmTrainResult r = lstm_train(toy, SequenceSet{}, toy_config(2));
  REQUIRE(r.history.size() >= 2);
  CHECK(r.history.front().epoch == 0);
  double best = r.history.front().train_loss;
  for (const auto& h : r.history) best = std::min(best, h.train_loss);
  CHECK(best <= 0.5 * r.history.front().train_loss);
}

TEST_CASE("same seed gives identical history and parameters") {
  const SequenceSet toy = oracle::toy_sequences(9);
  LstmTrainConfig cfg = toy_config(3);
  cfg.epochs = 20;
  const LstmTrainResult a = lstm_train(toy, toy, cfg);
  const LstmTrainResult b = lstm_train(toy, toy, cfg);
  CHECK(a.params == b.params);
  CHECK(a.history == b.history);
  cfg.seed = 4;
  CHECK_FALSE(lstm_train(toy, toy, cfg).params == a.params);
}

TEST_CASE("probability equal to the threshold is class 1") {
  const LstmParams p = LstmParams::zeros(2, 2);
  Rng rng(5);
  const SequenceSet s = oracle::random_sequences(rng, 3, 2, 2);
  const auto pred = lstm_predict(p, s, 0.5);
  for (int c : pred.classes) CHECK(c == 1);
}

TEST_CASE("duplication balances the classes") {
  SequenceSet s = oracle::toy_sequences(1);
  s.labels[1] = 0;
  s.labels[3] = 0;  // 12 vs 8
  const SequenceSet b = balance_by_duplication(s);
  std::size_t pos = 0;
  for (int l : b.labels) pos += l;
  CHECK(pos == 12);
  CHECK(b.size() == 24);
}

TEST_CASE("bad configurations and shapes are refused") {
  const SequenceSet toy = oracle::toy_sequences(1);
  LstmTrainConfig cfg = toy_config(0);
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(lstm_train(toy, SequenceSet{}, cfg), ConfigError);
  CHECK_THROWS_AS(lstm_train(SequenceSet{}, SequenceSet{}, toy_config(0)), DataError);
  const LstmParams p = LstmParams::zeros(4, 2);
  CHECK_THROWS_AS(lstm_probability(p, std::vector<double>{1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(LstmParams::init(0, 3, 0), ConfigError);
}
