#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace seizure {

/// Which side of a split a row was assigned to. Resampling refuses rows that
/// are not tagged `none` or `train`.
enum class SplitTag { none, train, validation, test };

struct RowMeta {
  std::string patient;
  std::string file;
  double start_s = 0.0;
  bool synthetic = false;  // produced by oversampling, never a real epoch
  SplitTag split = SplitTag::none;

  bool operator==(const RowMeta&) const = default;
};

/// Dense row-major matrix of per-epoch features with per-row provenance.
struct FeatureMatrix {
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<RowMeta> meta;

  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t columns) : cols(columns) {}

  /// Test/example convenience: rows with default metadata.
  static FeatureMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return meta.size(); }
  bool empty() const noexcept { return meta.empty(); }

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }

  void append_row(std::span<const double> row, RowMeta m = {});

  /// Rows at `indices`, in that order.
  FeatureMatrix select(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureMatrix&) const = default;
};

/// Feature rows plus their binary labels.
struct Dataset {
  FeatureMatrix X;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  Dataset select(std::span<const std::size_t> indices) const;
  std::size_t positives() const noexcept;
};

/// Throws ShapeError unless every label is 0 or 1 and sizes agree.
void check_binary_labels(const FeatureMatrix& X, std::span<const int> y);

}  // namespace seizure
