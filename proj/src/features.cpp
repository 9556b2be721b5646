#include "seizure/features.hpp"

#include <cmath>

#include "seizure/error.hpp"
#include "seizure/kernels.hpp"

namespace seizure {

FeatureMatrix extract_features(std::span<const Epoch> epochs, ChannelPooling pooling) {
  if (epochs.empty()) return FeatureMatrix{};
  const std::size_t channels = epochs.front().samples.size();
  if (channels == 0) throw ShapeError("epoch has no channels");
  for (const Epoch& e : epochs) {
    if (e.samples.size() != channels) {
      throw ShapeError("epoch at " + e.file_name + ":" + std::to_string(e.start_s) + " has " +
                       std::to_string(e.samples.size()) + " channels, expected " + std::to_string(channels));
    }
    for (const auto& ch : e.samples) {
      if (ch.size() < 2) {
        throw DataError("epoch at " + e.file_name + ":" + std::to_string(e.start_s) +
                        " has fewer than 2 samples in a channel");
      }
      for (double v : ch) {
        if (!std::isfinite(v)) throw DataError("non-finite sample in " + e.file_name + ":" + std::to_string(e.start_s));
      }
    }
  }

  const bool pooled = pooling == ChannelPooling::pooled;
  FeatureMatrix out(pooled ? 4 : 4 * channels);
  out.values.resize(epochs.size() * out.cols);
  kernels::epoch_statistics(epochs, pooled, out.values);
  out.meta.reserve(epochs.size());
  for (const Epoch& e : epochs) out.meta.push_back({e.patient_id, e.file_name, e.start_s});
  return out;
}

Scaler fit_scaler(const FeatureMatrix& train) {
  if (train.empty()) throw DataError("cannot fit scaler on an empty training matrix");
  const std::size_t d = train.cols;
  const auto n = static_cast<double>(train.rows());
  Scaler s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto row = train.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto row = train.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - s.mean[j];
      s.stddev[j] += c * c;
    }
  }
  for (double& v : s.stddev) v = std::sqrt(v / n);
  return s;
}

FeatureMatrix apply_scaler(const Scaler& s, const FeatureMatrix& m) {
  if (s.cols() != m.cols) {
    throw ShapeError("scaler fitted on " + std::to_string(s.cols()) + " columns, matrix has " + std::to_string(m.cols));
  }
  FeatureMatrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < out.cols; ++j) {
      row[j] = s.stddev[j] > 0.0 ? (row[j] - s.mean[j]) / s.stddev[j] : 0.0;
    }
  }
  return out;
}

}  // namespace seizure
