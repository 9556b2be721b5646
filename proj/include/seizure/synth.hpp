#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seizure/feature_matrix.hpp"
#include "seizure/preprocess.hpp"

namespace seizure {

/// Generator for labeled, patient-tagged feature rows that look like the
/// per-channel epoch statistics of a multichannel recording.
///
/// Each feature j has a base mean and a scale sigma_j. Both classes share a
/// two-component Gaussian mixture per feature, so the marginal is bimodal and
/// the within-class std is sigma_j. Seizure rows are shifted by
/// class_separation * sigma_j along a fixed random sign pattern, plus a
/// patient-specific deviation. Every patient also gets an offset vector of
/// scale patient_effect_scale * sigma_j shared by both classes, with its
/// component along the seizure shift removed. A fraction artifact_rate of the
/// non-seizure rows carries the same mean shift as a seizure (artifact epochs),
/// so the classes overlap and a classifier that follows the 6% prior finds
/// almost no seizures.
struct SynthConfig {
  std::size_t n_patients = 23;
  std::size_t epochs_per_patient = 1800;
  double seizure_prevalence = 0.06;
  std::size_t n_channels = 23;
  double class_separation = 0.35;
  double patient_effect_scale = 0.5;
  double artifact_rate = 0.10;
  double epoch_len_s = kDefaultEpochSeconds;
  std::uint64_t seed = 0;
  /// Samples per channel for the optional raw-epoch output; 0 disables it.
  std::size_t raw_samples_per_epoch = 0;
};

void validate(const SynthConfig& cfg);

struct SynthData {
  Dataset data;               // 4 * n_channels columns (mean, max, min, std per channel)
  std::vector<Epoch> epochs;  // raw windows, only when raw_samples_per_epoch > 0
};

/// Patient ids are "p01", "p02", ...; each patient has one file
/// "<id>_01.edf" whose epochs start at 0, L, 2L, ...
SynthData generate_synthetic(const SynthConfig& cfg);

/// Raw window whose per-channel mean and population std equal the requested
/// statistics exactly (std taken as |std|); max and min only approximately.
Epoch synthesize_epoch(std::span<const double> feature_row, std::size_t n_channels, std::size_t samples,
                       std::uint64_t seed);

}  // namespace seizure
