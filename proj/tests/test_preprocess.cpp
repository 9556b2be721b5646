#include <cmath>

#include "doctest.h"
#include "seizure/error.hpp"
#include "seizure/preprocess.hpp"
#include "seizure/rng.hpp"

using namespace seizure;

namespace {

Recording ramp(int channels, int rate, int seconds) {
  Recording r;
  r.patient_id = "chb01";
  r.record_duration_s = 1.0;
  r.num_records = seconds;
  for (int c = 0; c < channels; ++c) {
    ChannelMeta ch;
    ch.label = "C" + std::to_string(c);
    ch.samples_per_record = rate;
    r.channels.push_back(ch);
    std::vector<double> s(static_cast<std::size_t>(rate * seconds));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i) + 1000.0 * c;
    r.signals.push_back(std::move(s));
  }
  return r;
}

}  // namespace

TEST_CASE("60 s at 256 Hz gives 30 epochs of 512 samples") {
  const auto epochs = slice_epochs(ramp(2, 256, 60), 2.0, "chb01_01.edf");
  REQUIRE(epochs.size() == 30);
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    CHECK(epochs[e].start_s == 2.0 * static_cast<double>(e));
    CHECK(epochs[e].file_name == "chb01_01.edf");
    CHECK(epochs[e].patient_id == "chb01");
    REQUIRE(epochs[e].samples.size() == 2);
    CHECK(epochs[e].samples[0].size() == 512);
    CHECK(epochs[e].samples[0].front() == static_cast<double>(512 * e));
    CHECK(epochs[e].samples[1].back() == static_cast<double>(512 * e + 511) + 1000.0);
  }
}

TEST_CASE("trailing partial epoch is dropped") {
  CHECK(slice_epochs(ramp(1, 256, 5), 2.0).size() == 2);
  CHECK(slice_epochs(ramp(1, 256, 1), 2.0).empty());
}

TEST_CASE("mixed sample rates are refused") {
  Recording r = ramp(2, 256, 4);
  r.channels[1].samples_per_record = 128;
  r.signals[1].resize(128 * 4);
  CHECK_THROWS_AS(slice_epochs(r, 2.0), ConfigError);
}

TEST_CASE("epoch length must be a whole number of samples") {
  CHECK_THROWS_AS(slice_epochs(ramp(1, 3, 4), 0.5), ConfigError);
  CHECK_THROWS_AS(slice_epochs(ramp(1, 256, 4), 0.0), ConfigError);
}

TEST_CASE("detection labels: [10, 20) over 2 s epochs marks epochs 5..9") {
  const std::vector<SeizureInterval> s{{"f", 10.0, 20.0}};
  for (int e = 0; e < 30; ++e) {
    const int expected = (e >= 5 && e <= 9) ? 1 : 0;
    CHECK(detection_label(2.0 * e, 2.0, s) == expected);
  }
}

TEST_CASE("touching an interval boundary is not an overlap") {
  const std::vector<SeizureInterval> s{{"f", 10.0, 20.0}};
  CHECK(detection_label(8.0, 2.0, s) == 0);
  CHECK(detection_label(20.0, 2.0, s) == 0);
  CHECK(detection_label(19.5, 2.0, s) == 1);
  CHECK(detection_label(9.5, 1.0, s) == 1);
}

TEST_CASE("detection label agrees with a brute-force sample check") {
  Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SeizureInterval> s;
    const int n = static_cast<int>(uniform_index(rng, 4));
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(uniform_index(rng, 200));
      s.push_back({"f", a, a + 1.0 + static_cast<double>(uniform_index(rng, 20))});
    }
    const double start = static_cast<double>(uniform_index(rng, 220));
    // 256 Hz sample instants in [start, start + 2).
    int brute = 0;
    for (int k = 0; k < 512 && !brute; ++k) {
      const double t = start + k / 256.0;
      for (const auto& iv : s) brute |= (t >= iv.start_s && t < iv.end_s);
    }
    CHECK(detection_label(start, 2.0, s) == brute);
  }
}

TEST_CASE("prediction labels: preictal, interictal, excluded") {
  const std::vector<SeizureInterval> s{{"f", 600.0, 620.0}};
  CHECK(prediction_label(298.0, 2.0, s, 300.0) == 0);
  CHECK(prediction_label(300.0, 2.0, s, 300.0) == 1);
  CHECK(prediction_label(598.0, 2.0, s, 300.0) == 1);
  CHECK(prediction_label(600.0, 2.0, s, 300.0) == std::nullopt);
  CHECK(prediction_label(620.0, 2.0, s, 300.0) == 0);
  CHECK_THROWS_AS(prediction_label(0.0, 2.0, s, 0.0), ConfigError);
}

TEST_CASE("label_prediction drops ictal epochs") {
  auto epochs = slice_epochs(ramp(1, 4, 40), 2.0);
  const std::vector<SeizureInterval> s{{"f", 20.0, 24.0}};
  const auto set = label_prediction(std::move(epochs), s, 10.0);
  CHECK(set.epochs.size() == 18);
  CHECK(set.labels.size() == 18);
  int pos = 0;
  for (int l : set.labels) pos += l;
  CHECK(pos == 5);
  for (const Epoch& e : set.epochs) CHECK((e.start_s < 20.0 || e.start_s >= 24.0));
}

TEST_CASE("label_detection keeps order and counts") {
  auto set = label_detection(slice_epochs(ramp(1, 256, 60), 2.0), std::vector<SeizureInterval>{{"f", 10.0, 20.0}});
  REQUIRE(set.labels.size() == 30);
  int pos = 0;
  for (int l : set.labels) pos += l;
  CHECK(pos == 5);
  CHECK(set.task == Task::detection);
}

TEST_CASE("high-pass removes a constant offset") {
  Recording r = ramp(1, 256, 4);
  for (double& v : r.signals[0]) v = 50.0;
  highpass_filter(r, 1.0);
  for (double v : r.signals[0]) CHECK(v == 0.0);
  CHECK_THROWS_AS(highpass_filter(r, 0.0), ConfigError);
}

TEST_CASE("noise reduction disabled is the identity") {
  Recording r = ramp(2, 16, 3);
  const Recording before = r;
  apply_noise_reduction(r, NoiseReduction{});
  CHECK(r == before);
}

TEST_CASE("sequences never cross file boundaries and carry the last label") {
  FeatureMatrix X(1);
  std::vector<int> y;
  for (int f = 0; f < 2; ++f) {
    for (int i = 0; i < 5; ++i) {
      const double v = 10.0 * f + i;
      X.append_row(std::span<const double>(&v, 1), RowMeta{"p", "f" + std::to_string(f), 2.0 * i});
      y.push_back(i == 4 ? 1 : 0);
    }
  }
  const SequenceSet s = build_sequences(X, y, 3);
  REQUIRE(s.size() == 6);
  CHECK(s.sequences[0] == std::vector<double>{0, 1, 2});
  CHECK(s.sequences[2] == std::vector<double>{2, 3, 4});
  CHECK(s.labels[2] == 1);
  CHECK(s.sequences[3] == std::vector<double>{10, 11, 12});
  CHECK(s.meta[3].file == "f1");
  CHECK(s.step(4, 1)[0] == 12.0);
  CHECK(build_sequences(X, y, 6).size() == 0);
  CHECK_THROWS_AS(build_sequences(X, y, 0), ConfigError);
}
