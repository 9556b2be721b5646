#include "seizure/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seizure/error.hpp"

namespace seizure {
namespace {

bool overlaps(double a0, double a1, double b0, double b1) noexcept { return std::max(a0, b0) < std::min(a1, b1); }

}  // namespace

void highpass_filter(Recording& r, double cutoff_hz) {
  if (!(cutoff_hz > 0.0)) throw ConfigError("high-pass cutoff must be positive");
  const double rc = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
  for (std::size_t c = 0; c < r.channels.size(); ++c) {
    std::vector<double>& x = r.signals[c];
    if (x.empty()) continue;
    const double dt = 1.0 / r.sample_rate_hz(c);
    const double alpha = rc / (rc + dt);
    double prev_in = x[0];
    double prev_out = 0.0;
    x[0] = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double in = x[i];
      prev_out = alpha * (prev_out + in - prev_in);
      prev_in = in;
      x[i] = prev_out;
    }
  }
}

void apply_noise_reduction(Recording& r, const NoiseReduction& cfg) {
  if (cfg.highpass) highpass_filter(r, cfg.cutoff_hz);
}

std::vector<Epoch> slice_epochs(const Recording& r, double epoch_len_s, std::string_view file_name) {
  if (!(epoch_len_s > 0.0)) throw ConfigError("epoch length must be positive");
  std::vector<Epoch> epochs;
  if (r.channels.empty() || r.num_records == 0) return epochs;

  const double rate = r.sample_rate_hz(0);
  for (std::size_t c = 1; c < r.channels.size(); ++c) {
    if (r.sample_rate_hz(c) != rate) {
      throw ConfigError("channel '" + r.channels[c].label + "' samples at " + std::to_string(r.sample_rate_hz(c)) +
                        " Hz, channel 0 at " + std::to_string(rate) + " Hz; resampling is not supported");
    }
  }
  const double exact = epoch_len_s * rate;
  const double rounded = std::round(exact);
  if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    throw ConfigError("epoch length " + std::to_string(epoch_len_s) + " s x " + std::to_string(rate) +
                      " Hz is not a positive whole number of samples");
  }
  const auto window = static_cast<std::size_t>(rounded);
  const std::size_t total = r.signals[0].size();
  const std::size_t count = total / window;

  epochs.reserve(count);
  for (std::size_t e = 0; e < count; ++e) {
    Epoch ep;
    ep.patient_id = r.patient_id;
    ep.file_name = std::string(file_name);
    ep.start_s = static_cast<double>(e * window) / rate;
    ep.duration_s = epoch_len_s;
    ep.samples.reserve(r.channels.size());
    for (const auto& sig : r.signals) {
      const auto first = sig.begin() + static_cast<std::ptrdiff_t>(e * window);
      ep.samples.emplace_back(first, first + static_cast<std::ptrdiff_t>(window));
    }
    epochs.push_back(std::move(ep));
  }
  return epochs;
}

int detection_label(double start_s, double duration_s, std::span<const SeizureInterval> seizures) noexcept {
  for (const SeizureInterval& s : seizures) {
    if (overlaps(start_s, start_s + duration_s, s.start_s, s.end_s)) return 1;
  }
  return 0;
}

std::optional<int> prediction_label(double start_s, double duration_s, std::span<const SeizureInterval> seizures,
                                    double horizon_s) {
  if (!(horizon_s > 0.0)) throw ConfigError("prediction horizon must be positive");
  const double end_s = start_s + duration_s;
  if (detection_label(start_s, duration_s, seizures) == 1) return std::nullopt;
  for (const SeizureInterval& s : seizures) {
    if (overlaps(start_s, end_s, s.start_s - horizon_s, s.start_s)) return 1;
  }
  return 0;
}

LabeledEpochSet label_detection(std::vector<Epoch> epochs, std::span<const SeizureInterval> seizures) {
  LabeledEpochSet out;
  out.task = Task::detection;
  out.labels.reserve(epochs.size());
  for (const Epoch& e : epochs) out.labels.push_back(detection_label(e.start_s, e.duration_s, seizures));
  out.epochs = std::move(epochs);
  return out;
}

LabeledEpochSet label_prediction(std::vector<Epoch> epochs, std::span<const SeizureInterval> seizures,
                                 double horizon_s) {
  if (!(horizon_s > 0.0)) throw ConfigError("prediction horizon must be positive");
  LabeledEpochSet out;
  out.task = Task::prediction;
  for (Epoch& e : epochs) {
    const auto label = prediction_label(e.start_s, e.duration_s, seizures, horizon_s);
    if (!label) continue;
    out.labels.push_back(*label);
    out.epochs.push_back(std::move(e));
  }
  return out;
}

SequenceSet build_sequences(const FeatureMatrix& features, std::span<const int> labels, std::size_t length) {
  if (length == 0) throw ConfigError("sequence length must be >= 1");
  if (labels.size() != features.rows()) {
    throw ShapeError(std::to_string(features.rows()) + " feature rows but " + std::to_string(labels.size()) + " labels");
  }
  SequenceSet out;
  out.length = length;
  out.dim = features.cols;

  const std::size_t n = features.rows();
  std::size_t run_begin = 0;
  while (run_begin < n) {
    std::size_t run_end = run_begin + 1;
    while (run_end < n && features.meta[run_end].patient == features.meta[run_begin].patient &&
           features.meta[run_end].file == features.meta[run_begin].file) {
      ++run_end;
    }
    for (std::size_t last = run_begin + length - 1; last < run_end; ++last) {
      const std::size_t first = last + 1 - length;
      std::vector<double> seq;
      seq.reserve(length * out.dim);
      for (std::size_t i = first; i <= last; ++i) {
        const auto row = features.row(i);
        seq.insert(seq.end(), row.begin(), row.end());
      }
      out.sequences.push_back(std::move(seq));
      out.labels.push_back(labels[last]);
      out.meta.push_back(features.meta[last]);
    }
    run_begin = run_end;
  }
  return out;
}

}  // namespace seizure
