#include "seizure/split.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "seizure/error.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

void check_unique(const std::vector<std::string>& ids) {
  std::set<std::string> seen;
  for (const std::string& id : ids) {
    if (id.empty()) throw ConfigError("empty patient id");
    if (!seen.insert(id).second) throw ConfigError("duplicate patient id '" + id + "'");
  }
}

// Canonical order first so the outcome depends on the set of ids, not on the
// order the caller listed them in.
void seeded_shuffle(std::vector<std::string>& ids, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[uniform_index(rng, i)]);
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

}  // namespace

std::vector<std::string> patients_of(const FeatureMatrix& X) {
  std::set<std::string> ids;
  for (const RowMeta& m : X.meta) ids.insert(m.patient);
  return {ids.begin(), ids.end()};
}

SplitPlan split_patients(std::vector<std::string> patient_ids, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("split ratios must lie in [0, 1]");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  if (patient_ids.size() < 3) {
    throw ConfigError("patient split needs at least 3 patients, got " + std::to_string(patient_ids.size()));
  }
  check_unique(patient_ids);
  seeded_shuffle(patient_ids, seed);

  const std::size_t n = patient_ids.size();
  const std::size_t n_train = std::min(n, round_half_up(ratios[0] * static_cast<double>(n)));
  const std::size_t n_val = std::min(n - n_train, round_half_up(ratios[1] * static_cast<double>(n)));

  SplitPlan plan;
  plan.seed = seed;
  const auto first = patient_ids.begin();
  plan.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  plan.validation.assign(first + static_cast<std::ptrdiff_t>(n_train), first + static_cast<std::ptrdiff_t>(n_train + n_val));
  plan.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val), patient_ids.end());
  return plan;
}

std::vector<Fold> kfold_patients(std::vector<std::string> patient_ids, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (k > patient_ids.size()) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds the number of patients (" +
                      std::to_string(patient_ids.size()) + ")");
  }
  check_unique(patient_ids);
  seeded_shuffle(patient_ids, seed);

  const std::size_t n = patient_ids.size();
  std::vector<std::size_t> bounds{0};
  for (std::size_t i = 0; i < k; ++i) bounds.push_back(bounds.back() + n / k + (i < n % k ? 1 : 0));

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto& side = (j >= bounds[i] && j < bounds[i + 1]) ? folds[i].test : folds[i].train;
      side.push_back(patient_ids[j]);
    }
  }
  return folds;
}

std::vector<std::size_t> rows_for_patients(const FeatureMatrix& X, std::span<const std::string> patients) {
  const std::unordered_set<std::string> wanted(patients.begin(), patients.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    if (wanted.count(X.meta[i].patient)) rows.push_back(i);
  }
  return rows;
}

void assert_patient_disjoint(std::span<const std::string> train_patients, std::span<const std::string> evaluated_patients) {
  const std::unordered_set<std::string> train(train_patients.begin(), train_patients.end());
  for (const std::string& p : evaluated_patients) {
    if (train.count(p)) {
      throw LeakageError("leakage gate: patient '" + p + "' has rows on both the training and the evaluation side");
    }
  }
}

void assert_patient_disjoint(const FeatureMatrix& train, const FeatureMatrix& evaluated) {
  const auto a = patients_of(train);
  const auto b = patients_of(evaluated);
  assert_patient_disjoint(a, b);
  for (const RowMeta& m : evaluated.meta) {
    if (m.synthetic) throw LeakageError("leakage gate: evaluation rows include synthetic oversampled rows");
  }
}

}  // namespace seizure
