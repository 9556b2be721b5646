#include "seizure/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "seizure/error.hpp"
#include "seizure/logreg.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double bce_from_logit(double logit, int label) noexcept { return softplus(logit) - label * logit; }

void check_sequence(const LstmParams& p, std::span<const double> seq) {
  if (p.input_dim == 0 || seq.empty() || seq.size() % p.input_dim != 0) {
    throw ShapeError("LSTM: sequence of " + std::to_string(seq.size()) + " values does not match input_dim " +
                     std::to_string(p.input_dim));
  }
}

void check_set(const LstmParams& p, const SequenceSet& data) {
  if (data.size() > 0 && data.dim != p.input_dim) {
    throw ShapeError("LSTM: data dimension " + std::to_string(data.dim) + " != input_dim " + std::to_string(p.input_dim));
  }
}

// Accumulates the unscaled gradient of one sequence's loss into `g`.
double backward_one(const LstmParams& p, std::span<const double> seq, int label, std::span<double> g) {
  const std::size_t d = p.input_dim, h = p.hidden_dim, dz = p.concat_dim();
  const LstmTrace tr = lstm_forward(p, seq);
  const double loss = bce_from_logit(tr.logit, label);

  const std::size_t wc = p.weight_count();
  double* gW = g.data();
  double* gb = g.data() + wc;
  double* gw_out = gb + 4 * h;
  double& gb_out = g[g.size() - 1];

  const double dlogit = tr.probability - label;
  const double* h_last = tr.hidden.data() + tr.steps * h;
  const auto w_out = p.w_out();
  for (std::size_t u = 0; u < h; ++u) gw_out[u] += dlogit * h_last[u];
  gb_out += dlogit;

  std::vector<double> dh(h), dc(h, 0.0), da(4 * h), dz_vec(dz);
  for (std::size_t u = 0; u < h; ++u) dh[u] = dlogit * w_out[u];

  const auto W = p.W();
  for (std::size_t step = tr.steps; step-- > 0;) {
    const double* gate = tr.gates.data() + step * 4 * h;
    const double* ig = gate;
    const double* fg = gate + h;
    const double* og = gate + 2 * h;
    const double* cg = gate + 3 * h;
    const double* tc = tr.tanh_c.data() + step * h;
    const double* c_prev = tr.cell.data() + step * h;
    for (std::size_t u = 0; u < h; ++u) {
      const double d_o = dh[u] * tc[u];
      dc[u] += dh[u] * og[u] * (1.0 - tc[u] * tc[u]);
      const double d_i = dc[u] * cg[u];
      const double d_g = dc[u] * ig[u];
      const double d_f = dc[u] * c_prev[u];
      da[u] = d_i * ig[u] * (1.0 - ig[u]);
      da[h + u] = d_f * fg[u] * (1.0 - fg[u]);
      da[2 * h + u] = d_o * og[u] * (1.0 - og[u]);
      da[3 * h + u] = d_g * (1.0 - cg[u] * cg[u]);
      dc[u] *= fg[u];  // becomes dL/dc_{t-1}
    }
    const double* z = tr.z.data() + step * dz;
    std::fill(dz_vec.begin(), dz_vec.end(), 0.0);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double a = da[r];
      gb[r] += a;
      double* gw_row = gW + r * dz;
      const double* w_row = W.data() + r * dz;
      for (std::size_t k = 0; k < dz; ++k) {
        gw_row[k] += a * z[k];
        dz_vec[k] += a * w_row[k];
      }
    }
    for (std::size_t u = 0; u < h; ++u) dh[u] = dz_vec[d + u];
  }
  return loss;
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  if (input_dim == 0 || hidden_dim == 0) throw ConfigError("LSTM: dimensions must be positive");
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.values.assign(p.weight_count() + 4 * hidden_dim + hidden_dim + 1, 0.0);
  return p;
}

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
  LstmParams p = zeros(input_dim, hidden_dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  Rng rng(seed);
  for (double& v : p.values) v = -s + 2.0 * s * uniform01(rng);
  auto bias = p.b();
  std::fill_n(bias.begin() + static_cast<std::ptrdiff_t>(forget * hidden_dim), hidden_dim, 1.0);
  return p;
}

LstmTrace lstm_forward(const LstmParams& p, std::span<const double> seq) {
  check_sequence(p, seq);
  const std::size_t d = p.input_dim, h = p.hidden_dim, dz = p.concat_dim();
  LstmTrace tr;
  tr.steps = seq.size() / d;
  tr.z.resize(tr.steps * dz);
  tr.gates.resize(tr.steps * 4 * h);
  tr.cell.assign((tr.steps + 1) * h, 0.0);
  tr.tanh_c.resize(tr.steps * h);
  tr.hidden.assign((tr.steps + 1) * h, 0.0);

  const auto W = p.W();
  const auto b = p.b();
  for (std::size_t t = 0; t < tr.steps; ++t) {
    double* z = tr.z.data() + t * dz;
    std::copy_n(seq.data() + t * d, d, z);
    std::copy_n(tr.hidden.data() + t * h, h, z + d);

    double* gate = tr.gates.data() + t * 4 * h;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double* w_row = W.data() + r * dz;
      double a = b[r];
      for (std::size_t k = 0; k < dz; ++k) a += w_row[k] * z[k];
      gate[r] = r < 3 * h ? sigmoid(a) : std::tanh(a);
    }
    const double* c_prev = tr.cell.data() + t * h;
    double* c = tr.cell.data() + (t + 1) * h;
    double* tc = tr.tanh_c.data() + t * h;
    double* hid = tr.hidden.data() + (t + 1) * h;
    for (std::size_t u = 0; u < h; ++u) {
      c[u] = gate[h + u] * c_prev[u] + gate[u] * gate[3 * h + u];
      tc[u] = std::tanh(c[u]);
      hid[u] = gate[2 * h + u] * tc[u];
    }
  }
  const double* h_last = tr.hidden.data() + tr.steps * h;
  const auto w_out = p.w_out();
  tr.logit = p.b_out();
  for (std::size_t u = 0; u < h; ++u) tr.logit += w_out[u] * h_last[u];
  tr.probability = sigmoid(tr.logit);
  return tr;
}

double lstm_probability(const LstmParams& p, std::span<const double> sequence) {
  return lstm_forward(p, sequence).probability;
}

double lstm_loss(const LstmParams& p, const SequenceSet& data, std::span<const std::size_t> batch) {
  if (batch.empty()) throw DataError("LSTM: empty batch");
  check_set(p, data);
  std::vector<double> losses(batch.size());
  const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t s = batch[static_cast<std::size_t>(i)];
    losses[static_cast<std::size_t>(i)] = bce_from_logit(lstm_forward(p, data.sequences[s]).logit, data.labels[s]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) throw DataError("LSTM: non-finite loss on sequence " + std::to_string(batch[i]));
    total += losses[i];
  }
  return total / static_cast<double>(batch.size());
}

LstmGradient lstm_grad(const LstmParams& p, const SequenceSet& data, std::span<const std::size_t> batch, double clip_norm) {
  if (batch.empty()) throw DataError("LSTM: empty batch");
  check_set(p, data);
  const std::size_t P = p.values.size();
  std::vector<double> per_sample(batch.size() * P, 0.0);
  std::vector<double> losses(batch.size());
  const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const std::size_t s = batch[ui];
    losses[ui] = backward_one(p, data.sequences[s], data.labels[s], std::span(per_sample).subspan(ui * P, P));
  }

  LstmGradient out{LstmParams::zeros(p.input_dim, p.hidden_dim), 0.0, 0.0, false};
  // Fixed reduction order keeps the result independent of thread count.
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!std::isfinite(losses[i])) throw DataError("LSTM: non-finite loss on sequence " + std::to_string(batch[i]));
    out.loss += losses[i];
    const double* src = per_sample.data() + i * P;
    for (std::size_t k = 0; k < P; ++k) out.grad.values[k] += src[k];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  double sq = 0.0;
  for (double& v : out.grad.values) {
    v *= inv;
    sq += v * v;
  }
  out.norm = std::sqrt(sq);
  if (out.norm > clip_norm) {
    const double scale = clip_norm / out.norm;
    for (double& v : out.grad.values) v *= scale;
    out.clipped = true;
  }
  return out;
}

LstmTrainResult lstm_train(const SequenceSet& train, const SequenceSet& val, const LstmTrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("LSTM: learning_rate must be positive");
  if (cfg.epochs == 0) throw ConfigError("LSTM: epochs must be positive");
  if (cfg.batch_size == 0) throw ConfigError("LSTM: batch_size must be positive");
  if (!(cfg.grad_clip_norm > 0.0)) throw ConfigError("LSTM: grad_clip_norm must be positive");
  if (cfg.hidden_dim == 0) throw ConfigError("LSTM: hidden_dim must be positive");
  if (train.size() == 0) throw DataError("LSTM: empty training set");
  if (val.size() > 0 && val.dim != train.dim) throw ShapeError("LSTM: validation dimension mismatch");

  LstmTrainResult result;
  LstmParams params = LstmParams::init(train.dim, cfg.hidden_dim, derive_seed(cfg.seed, 0));

  std::vector<std::size_t> all_train(train.size());
  std::iota(all_train.begin(), all_train.end(), std::size_t{0});
  std::vector<std::size_t> all_val(val.size());
  std::iota(all_val.begin(), all_val.end(), std::size_t{0});

  auto evaluate = [&](std::size_t epoch) {
    LstmEpochStats s;
    s.epoch = epoch;
    s.train_loss = lstm_loss(params, train, all_train);
    s.val_loss = val.size() > 0 ? lstm_loss(params, val, all_val) : s.train_loss;
    result.history.push_back(s);
    return s.val_loss;
  };

  double best = evaluate(0);
  result.params = params;
  std::size_t since_best = 0;
  std::vector<std::size_t> order = all_train;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::sort(order.begin(), order.end());
    Rng rng(derive_seed(cfg.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - first);
      const auto g = lstm_grad(params, train, std::span(order).subspan(first, len), cfg.grad_clip_norm);
      for (std::size_t k = 0; k < params.values.size(); ++k) params.values[k] -= cfg.learning_rate * g.grad.values[k];
    }
    const double loss = evaluate(epoch);
    if (loss < best) {
      best = loss;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

LstmPrediction lstm_predict(const LstmParams& p, const SequenceSet& data, double threshold) {
  check_set(p, data);
  LstmPrediction out;
  out.probabilities.resize(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out.probabilities[static_cast<std::size_t>(i)] = lstm_probability(p, data.sequences[static_cast<std::size_t>(i)]);
  }
  out.classes.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.classes[i] = out.probabilities[i] >= threshold ? 1 : 0;
  return out;
}

SequenceSet balance_by_duplication(const SequenceSet& data) {
  SequenceSet out = data;
  const auto pos = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  const std::size_t neg = data.size() - pos;
  if (pos == 0 || neg == 0 || pos == neg) return out;
  const int minority = pos < neg ? 1 : 0;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == minority) members.push_back(i);
  }
  const std::size_t extra = std::max(pos, neg) - members.size();
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t src = members[k % members.size()];
    out.sequences.push_back(data.sequences[src]);
    out.labels.push_back(data.labels[src]);
    if (!data.meta.empty()) {
      RowMeta m = data.meta[src];
      m.synthetic = true;
      out.meta.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace seizure
