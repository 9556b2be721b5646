#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seizure/preprocess.hpp"

namespace seizure {

/// Single-layer LSTM with a logistic output head on the last hidden state.
///
/// All parameters live in one flat vector so gradients, SGD updates and finite
/// difference checks can treat them uniformly. Layout:
///   W      4h x (d + h), row-major; gate blocks in the order i, f, o, g and
///          columns [x_t, h_{t-1}]
///   b      4h, same gate order
///   w_out  h
///   b_out  1
struct LstmParams {
  enum Gate : std::size_t { input = 0, forget = 1, output = 2, cell = 3 };

  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<double> values;

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  /// Uniform(-1/sqrt(h), 1/sqrt(h)) everywhere except the forget-gate bias, set to 1.
  static LstmParams init(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed);

  std::size_t concat_dim() const noexcept { return input_dim + hidden_dim; }
  std::size_t weight_count() const noexcept { return 4 * hidden_dim * concat_dim(); }

  std::span<double> W() { return {values.data(), weight_count()}; }
  std::span<const double> W() const { return {values.data(), weight_count()}; }
  std::span<double> b() { return {values.data() + weight_count(), 4 * hidden_dim}; }
  std::span<const double> b() const { return {values.data() + weight_count(), 4 * hidden_dim}; }
  std::span<double> w_out() { return {values.data() + weight_count() + 4 * hidden_dim, hidden_dim}; }
  std::span<const double> w_out() const { return {values.data() + weight_count() + 4 * hidden_dim, hidden_dim}; }
  double& b_out() { return values.back(); }
  double b_out() const { return values.back(); }

  /// h x (d + h) block of one gate.
  std::span<const double> gate_weights(Gate g) const {
    return W().subspan(g * hidden_dim * concat_dim(), hidden_dim * concat_dim());
  }
  std::span<const double> gate_bias(Gate g) const { return b().subspan(g * hidden_dim, hidden_dim); }

  bool operator==(const LstmParams&) const = default;
};

/// Activations kept from the forward pass for backpropagation.
struct LstmTrace {
  std::size_t steps = 0;
  std::vector<double> z;       // steps x (d + h): [x_t, h_{t-1}]
  std::vector<double> gates;   // steps x 4h: activated i, f, o, g
  std::vector<double> cell;    // (steps + 1) x h, row 0 = c_0 = 0
  std::vector<double> tanh_c;  // steps x h
  std::vector<double> hidden;  // (steps + 1) x h, row 0 = h_0 = 0
  double logit = 0.0;
  double probability = 0.5;
};

/// Runs the recurrence over a T x d sequence (row-major by time step).
LstmTrace lstm_forward(const LstmParams& p, std::span<const double> sequence);

double lstm_probability(const LstmParams& p, std::span<const double> sequence);

struct LstmGradient {
  LstmParams grad;  // same layout as the parameters
  double loss = 0.0;
  double norm = 0.0;  // global L2 norm before clipping
  bool clipped = false;
};

/// Mean binary cross-entropy over `batch` (indices into `data`).
double lstm_loss(const LstmParams& p, const SequenceSet& data, std::span<const std::size_t> batch);

/// Exact BPTT gradient of lstm_loss, rescaled to global norm `clip_norm` when
/// it exceeds it (pass infinity to disable).
LstmGradient lstm_grad(const LstmParams& p, const SequenceSet& data, std::span<const std::size_t> batch, double clip_norm);

struct LstmTrainConfig {
  std::size_t hidden_dim = 64;
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 0;
  std::size_t patience = 5;  // epochs without validation improvement; 0 disables
};

struct LstmEpochStats {
  std::size_t epoch = 0;  // 0 = before any update
  double train_loss = 0.0;
  double val_loss = 0.0;

  bool operator==(const LstmEpochStats&) const = default;
};

struct LstmTrainResult {
  LstmParams params;  // from the epoch with the lowest validation loss
  std::vector<LstmEpochStats> history;
  std::size_t best_epoch = 0;
};

/// Mini-batch SGD over seeded shuffles. With an empty validation set the
/// training loss is used for model selection.
LstmTrainResult lstm_train(const SequenceSet& train, const SequenceSet& val, const LstmTrainConfig& cfg);

struct LstmPrediction {
  std::vector<double> probabilities;
  std::vector<int> classes;  // 1 iff probability >= threshold
};

LstmPrediction lstm_predict(const LstmParams& p, const SequenceSet& data, double threshold = 0.5);

/// Repeats minority-class windows (round robin) until both classes have the
/// same count.
SequenceSet balance_by_duplication(const SequenceSet& data);

}  // namespace seizure
