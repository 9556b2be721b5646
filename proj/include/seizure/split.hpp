#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "seizure/feature_matrix.hpp"

namespace seizure {

/// Patient-level partition. Sets are pairwise disjoint and cover every patient.
struct SplitPlan {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  bool operator==(const SplitPlan&) const = default;
};

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> test;

  bool operator==(const Fold&) const = default;
};

/// Distinct patient ids of a matrix, sorted.
std::vector<std::string> patients_of(const FeatureMatrix& X);

/// Seeded shuffle, then n_train = round(r0 n), n_val = round(r1 n) (halves
/// round up) and the remainder to test.
SplitPlan split_patients(std::vector<std::string> patient_ids, std::array<double, 3> ratios, std::uint64_t seed);

/// Seeded shuffle, then contiguous chunks; the first n % k folds get one extra
/// patient. Fold i is the test side, the rest train.
std::vector<Fold> kfold_patients(std::vector<std::string> patient_ids, std::size_t k, std::uint64_t seed);

/// Row indices whose patient is in `patients`, in row order.
std::vector<std::size_t> rows_for_patients(const FeatureMatrix& X, std::span<const std::string> patients);

/// The leakage gate: throws LeakageError naming the first patient found in
/// both row sets.
void assert_patient_disjoint(const FeatureMatrix& train, const FeatureMatrix& evaluated);
void assert_patient_disjoint(std::span<const std::string> train_patients, std::span<const std::string> evaluated_patients);

}  // namespace seizure
