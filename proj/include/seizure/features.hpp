#pragma once

#include <span>
#include <vector>

#include "seizure/feature_matrix.hpp"
#include "seizure/preprocess.hpp"

namespace seizure {

enum class ChannelPooling {
  per_channel,  // 4 x C columns: (mean, max, min, std) for each channel in order
  pooled,       // 4 columns over all channels' samples together
};

/// Per-epoch mean, maximum, minimum and population standard deviation.
FeatureMatrix extract_features(std::span<const Epoch> epochs, ChannelPooling pooling = ChannelPooling::per_channel);

/// Column-wise z-score statistics (population std), fitted on training rows.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t cols() const noexcept { return mean.size(); }
  bool operator==(const Scaler&) const = default;
};

Scaler fit_scaler(const FeatureMatrix& train);

/// z = (x - mean) / std; zero-std columns map to 0.
FeatureMatrix apply_scaler(const Scaler& s, const FeatureMatrix& m);

}  // namespace seizure
