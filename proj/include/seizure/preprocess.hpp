#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seizure/edf.hpp"
#include "seizure/feature_matrix.hpp"
#include "seizure/summary.hpp"

namespace seizure {

constexpr double kDefaultEpochSeconds = 2.0;
constexpr double kDefaultHorizonSeconds = 300.0;

struct Epoch {
  std::string patient_id;
  std::string file_name;
  double start_s = 0.0;
  double duration_s = kDefaultEpochSeconds;
  std::vector<std::vector<double>> samples;  // [channel][sample]
};

enum class Task { detection, prediction };

struct LabeledEpochSet {
  std::vector<Epoch> epochs;
  std::vector<int> labels;
  Task task = Task::detection;
};

/// Optional cleanup applied before epoching. Disabled by default, in which
/// case the signal passes through unchanged.
struct NoiseReduction {
  bool highpass = false;
  double cutoff_hz = 0.5;
};

/// First-order IIR high-pass applied to every channel in place.
void highpass_filter(Recording& r, double cutoff_hz);
void apply_noise_reduction(Recording& r, const NoiseReduction& cfg);

/// Non-overlapping windows of `epoch_len_s` from t = 0; the trailing partial
/// window is dropped. All channels must share one sample rate.
std::vector<Epoch> slice_epochs(const Recording& r, double epoch_len_s, std::string_view file_name = {});

/// 1 iff [start, start + duration) overlaps a seizure with nonzero measure.
int detection_label(double start_s, double duration_s, std::span<const SeizureInterval> seizures) noexcept;

/// 1 for preictal, 0 for interictal, nullopt for epochs overlapping a seizure
/// (excluded from the prediction task).
std::optional<int> prediction_label(double start_s, double duration_s, std::span<const SeizureInterval> seizures,
                                    double horizon_s);

LabeledEpochSet label_detection(std::vector<Epoch> epochs, std::span<const SeizureInterval> seizures);
LabeledEpochSet label_prediction(std::vector<Epoch> epochs, std::span<const SeizureInterval> seizures,
                                 double horizon_s);

/// Fixed-length windows of consecutive feature rows, used as LSTM input.
struct SequenceSet {
  std::size_t length = 0;                     // T
  std::size_t dim = 0;                        // d
  std::vector<std::vector<double>> sequences; // each T*d, row-major by time step
  std::vector<int> labels;
  std::vector<RowMeta> meta;                  // metadata of the last epoch in the window

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> step(std::size_t seq, std::size_t t) const {
    return {sequences[seq].data() + t * dim, dim};
  }
};

/// Sliding windows of `length` consecutive rows; the label of a window is the
/// label of its last row. Rows must be time-ordered within each file; windows
/// never cross a change of (patient, file).
SequenceSet build_sequences(const FeatureMatrix& features, std::span<const int> labels, std::size_t length);

}  // namespace seizure
