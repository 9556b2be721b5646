#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace seizure {

/// Start date/time of a recording. `year` is the full four-digit year; the
/// two-digit EDF field maps 85..99 to 1985..1999 and 00..84 to 2000..2084.
struct EdfDateTime {
  int day = 1;
  int month = 1;
  int year = 2000;
  int hour = 0;
  int minute = 0;
  int second = 0;

  bool operator==(const EdfDateTime&) const = default;
};

struct ChannelMeta {
  std::string label;               // 16 chars
  std::string transducer;          // 80
  std::string physical_dimension;  // 8
  double physical_min = -1.0;
  double physical_max = 1.0;
  int digital_min = -32768;
  int digital_max = 32767;
  std::string prefiltering;  // 80
  int samples_per_record = 1;

  /// Physical units per digital step.
  double gain() const noexcept {
    return (physical_max - physical_min) / static_cast<double>(digital_max - digital_min);
  }

  bool operator==(const ChannelMeta&) const = default;
};

struct Recording {
  std::string patient_id;
  std::string recording_id;
  EdfDateTime start;
  double record_duration_s = 1.0;
  std::int64_t num_records = 0;
  std::vector<ChannelMeta> channels;
  /// signals[c] holds num_records * channels[c].samples_per_record physical values.
  std::vector<std::vector<double>> signals;

  double sample_rate_hz(std::size_t channel) const {
    return static_cast<double>(channels.at(channel).samples_per_record) / record_duration_s;
  }
  double duration_s() const noexcept { return static_cast<double>(num_records) * record_duration_s; }

  bool operator==(const Recording&) const = default;
};

/// Maps a stored digital value to physical units. Exact at both ends of the
/// digital range.
double to_physical(const ChannelMeta& ch, int digital) noexcept;

/// Nearest digital value for a physical one. Throws RangeError (naming the
/// channel and `index`) when the value lies outside the physical range.
int to_digital(const ChannelMeta& ch, double physical, std::size_t index);

/// Checks the Recording invariants; throws CalibrationError / ShapeError.
void validate(const Recording& r);

/// Decodes a complete EDF file image.
Recording parse_edf(std::span<const std::uint8_t> bytes);

/// Encodes a Recording as an EDF file image. Numeric header values must be
/// representable losslessly in their fixed-width ASCII fields.
std::vector<std::uint8_t> write_edf(const Recording& r);

Recording read_edf_file(const std::filesystem::path& path);
void write_edf_file(const std::filesystem::path& path, const Recording& r);

}  // namespace seizure
