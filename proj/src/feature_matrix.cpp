#include "seizure/feature_matrix.hpp"

#include <algorithm>

#include "seizure/error.hpp"

namespace seizure {

FeatureMatrix FeatureMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  FeatureMatrix m(rows.size() == 0 ? 0 : rows.begin()->size());
  for (const auto& r : rows) {
    const std::vector<double> v(r);
    m.append_row(v);
  }
  return m;
}

void FeatureMatrix::append_row(std::span<const double> row, RowMeta m) {
  if (row.size() != cols) {
    throw ShapeError("row has " + std::to_string(row.size()) + " values, matrix has " + std::to_string(cols) + " columns");
  }
  values.insert(values.end(), row.begin(), row.end());
  meta.push_back(std::move(m));
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  FeatureMatrix out(cols);
  out.values.reserve(indices.size() * cols);
  out.meta.reserve(indices.size());
  for (std::size_t i : indices) out.append_row(row(i), meta.at(i));
  return out;
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Dataset out{X.select(indices), {}};
  out.y.reserve(indices.size());
  for (std::size_t i : indices) out.y.push_back(y.at(i));
  return out;
}

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

void check_binary_labels(const FeatureMatrix& X, std::span<const int> y) {
  if (X.rows() != y.size()) {
    throw ShapeError(std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) + " labels");
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw ShapeError("labels must be 0 or 1, got " + std::to_string(v));
  }
}

}  // namespace seizure
