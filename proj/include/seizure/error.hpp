#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace seizure {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed binary or text input. Carries the byte offset and the field being
/// decoded when the failure happened.
class ParseError : public Error {
 public:
  ParseError(std::string field, std::size_t offset, const std::string& detail)
      : Error("parse error in '" + field + "' at byte " + std::to_string(offset) + ": " + detail),
        field_(std::move(field)),
        offset_(offset) {}

  const std::string& field() const noexcept { return field_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string field_;
  std::size_t offset_;
};

/// Channel calibration that cannot map digital values to physical ones.
class CalibrationError : public Error {
 public:
  CalibrationError(std::string channel, const std::string& detail)
      : Error("calibration error in channel '" + channel + "': " + detail), channel_(std::move(channel)) {}

  const std::string& channel() const noexcept { return channel_; }

 private:
  std::string channel_;
};

/// A value that does not fit its declared range (physical range, field width).
class RangeError : public Error {
 public:
  RangeError(std::string channel, std::size_t index, const std::string& detail)
      : Error("range error in channel '" + channel + "' at sample " + std::to_string(index) + ": " + detail),
        channel_(std::move(channel)),
        index_(index) {}

  const std::string& channel() const noexcept { return channel_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::string channel_;
  std::size_t index_;
};

/// Invalid configuration or hyperparameter.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mismatched matrix/vector dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or unusable data (annotation mismatch, too few samples, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A patient contributes rows to both the training and the evaluation side.
class LeakageError : public Error {
 public:
  using Error::Error;
};

}  // namespace seizure
