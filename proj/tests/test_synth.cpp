#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "seizure/error.hpp"
#include "seizure/features.hpp"
#include "seizure/pipeline.hpp"
#include "seizure/synth.hpp"

using namespace seizure;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c;
  c.n_patients = 10;
  c.epochs_per_patient = 300;
  c.n_channels = 4;
  c.seed = seed;
  return c;
}

// Highest accuracy any threshold on the scores achieves.
double best_threshold_accuracy(const Evaluation& ev) {
  std::vector<std::pair<double, int>> v;
  for (std::size_t i = 0; i < ev.scores.size(); ++i) v.emplace_back(ev.scores[i], ev.labels[i]);
  std::sort(v.begin(), v.end());
  std::size_t pos = 0;
  for (const auto& p : v) pos += static_cast<std::size_t>(p.second);
  std::size_t neg_below = 0, pos_below = 0;
  double best = 0.0;
  for (std::size_t i = 0; i <= v.size(); ++i) {
    best = std::max(best, static_cast<double>(neg_below + pos - pos_below) / static_cast<double>(v.size()));
    if (i < v.size()) (v[i].second ? pos_below : neg_below)++;
  }
  return best;
}

}  // namespace

TEST_CASE("default config: shape, ids and prevalence") {
  const SynthData s = generate_synthetic(SynthConfig{});
  const Dataset& d = s.data;
  CHECK(d.size() == 23 * 1800);
  CHECK(d.X.cols == 92);
  const double rate = static_cast<double>(d.positives()) / static_cast<double>(d.size());
  CHECK(std::abs(rate - 0.06) <= 0.01);
  CHECK(d.X.meta.front().patient == "p01");
  CHECK(d.X.meta.front().file == "p01_01.edf");
  CHECK(d.X.meta[1].start_s == 2.0);
  CHECK(d.X.meta.back().patient == "p23");
  CHECK(s.epochs.empty());
}

TEST_CASE("same seed is bit-identical, other seeds differ") {
  const SynthConfig c = small_config(4);
  const SynthData a = generate_synthetic(c);
  const SynthData b = generate_synthetic(c);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);
  CHECK_FALSE(generate_synthetic(small_config(5)).data.X == a.data.X);
}

TEST_CASE("majority predictor on the default data scores 0.94 with zero recall") {
  const Dataset d = generate_synthetic(SynthConfig{}).data;
  PipelineConfig cfg;
  cfg.model.kind = ModelKind::majority;
  const HoldoutResult r = run_holdout(d, {0.5, 0.25, 0.25}, 0, cfg);
  CHECK(std::abs(r.test.report.accuracy - 0.94) <= 0.005);
  CHECK(r.test.report.recall == 0.0);
}

TEST_CASE("zero separation leaves nothing to learn") {
  SynthConfig c;
  c.class_separation = 0.0;
  const Dataset d = generate_synthetic(c).data;
  PipelineConfig cfg;
  cfg.model.kind = ModelKind::logreg;
  const HoldoutResult r = run_holdout(d, {0.5, 0.25, 0.25}, 0, cfg);
  REQUIRE(r.test.report.roc.has_value());
  CHECK(std::abs(r.test.report.roc->auc - 0.5) <= 0.05);
  const double majority = 1.0 - static_cast<double>(std::count(r.test.labels.begin(), r.test.labels.end(), 1)) /
                                    static_cast<double>(r.test.labels.size());
  CHECK(best_threshold_accuracy(r.test) <= majority + 0.005);
}

TEST_CASE("a linear classifier stays below 0.99 accuracy on the default data") {
  const Dataset d = generate_synthetic(SynthConfig{}).data;
  PipelineConfig cfg;
  cfg.model.kind = ModelKind::logreg;
  const HoldoutResult r = run_holdout(d, {0.5, 0.25, 0.25}, 0, cfg);
  CHECK(r.test.report.accuracy < 0.99);
  CHECK(best_threshold_accuracy(r.test) < 0.99);
}

TEST_CASE("record-level splits are optimistic compared with patient splits") {
  SynthConfig c;
  c.epochs_per_patient = 300;
  c.n_channels = 8;
  c.patient_effect_scale = 1.0;
  c.seed = 1;
  const Dataset d = generate_synthetic(c).data;
  PipelineConfig cfg;
  cfg.model.kind = ModelKind::knn;
  cfg.model.knn.k = 15;
  cfg.model.knn.balanced_weights = true;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const HoldoutResult patient = run_holdout(d, {0.5, 0.25, 0.25}, seed, cfg);
    const HoldoutResult record = run_record_holdout(d, {0.5, 0.25, 0.25}, seed, cfg);
    REQUIRE(patient.test.report.roc.has_value());
    REQUIRE(record.test.report.roc.has_value());
    CHECK(record.test.report.roc->auc >= patient.test.report.roc->auc);
  }
}

TEST_CASE("raw epochs reproduce the requested mean and std") {
  SynthConfig c = small_config(2);
  c.n_patients = 3;
  c.epochs_per_patient = 5;
  c.raw_samples_per_epoch = 256;
  const SynthData s = generate_synthetic(c);
  REQUIRE(s.epochs.size() == 15);
  const FeatureMatrix F = extract_features(s.epochs);
  for (std::size_t r = 0; r < 15; ++r) {
    CHECK(s.epochs[r].samples.size() == c.n_channels);
    CHECK(s.epochs[r].start_s == s.data.X.meta[r].start_s);
    for (std::size_t ch = 0; ch < c.n_channels; ++ch) {
      CHECK(F.row(r)[4 * ch] == doctest::Approx(s.data.X.row(r)[4 * ch]).epsilon(1e-9));
      CHECK(F.row(r)[4 * ch + 3] == doctest::Approx(std::abs(s.data.X.row(r)[4 * ch + 3])).epsilon(1e-9));
    }
  }
}

TEST_CASE("invalid configurations are refused") {
  SynthConfig c;
  c.seizure_prevalence = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = SynthConfig{};
  c.n_patients = 0;
  CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
  c = SynthConfig{};
  c.artifact_rate = 1.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
}
