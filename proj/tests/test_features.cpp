#include <cmath>
#include <sstream>

#include "doctest.h"
#include "seizure/error.hpp"
#include "seizure/feature_csv.hpp"
#include "seizure/features.hpp"
#include "seizure/rng.hpp"

using namespace seizure;

namespace {

Epoch epoch_of(std::vector<std::vector<double>> samples) {
  Epoch e;
  e.patient_id = "p";
  e.file_name = "f.edf";
  e.samples = std::move(samples);
  return e;
}

Epoch random_epoch(Rng& rng, std::size_t channels, std::size_t n) {
  std::vector<std::vector<double>> s(channels, std::vector<double>(n));
  for (auto& ch : s) {
    for (double& v : ch) v = 200.0 * uniform01(rng) - 100.0;
  }
  return epoch_of(std::move(s));
}

}  // namespace

TEST_CASE("features of [1, 2, 3, 4]") {
  const std::vector<Epoch> e{epoch_of({{1, 2, 3, 4}})};
  const FeatureMatrix F = extract_features(e);
  REQUIRE(F.cols == 4);
  CHECK(F.values[0] == 2.5);
  CHECK(F.values[1] == 4.0);
  CHECK(F.values[2] == 1.0);
  CHECK(F.values[3] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
}

TEST_CASE("per-channel layout is (mean, max, min, std) per channel in order") {
  const std::vector<Epoch> e{epoch_of({{0, 2}, {5, 5}})};
  const FeatureMatrix F = extract_features(e);
  REQUIRE(F.cols == 8);
  CHECK(std::vector<double>(F.values.begin(), F.values.end()) == std::vector<double>{1, 2, 0, 1, 5, 5, 5, 0});
}

TEST_CASE("pooled features match a single concatenated channel") {
  Rng rng(3);
  const Epoch e = random_epoch(rng, 3, 64);
  std::vector<double> all;
  for (const auto& ch : e.samples) all.insert(all.end(), ch.begin(), ch.end());
  const std::vector<Epoch> pooled_in{e};
  const std::vector<Epoch> flat_in{epoch_of({all})};
  const FeatureMatrix a = extract_features(pooled_in, ChannelPooling::pooled);
  const FeatureMatrix b = extract_features(flat_in);
  REQUIRE(a.cols == 4);
  for (int j = 0; j < 4; ++j) CHECK(a.values[j] == doctest::Approx(b.values[j]).epsilon(1e-12));
}

TEST_CASE("translation shifts mean, max, min and leaves std") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Epoch e = random_epoch(rng, 2, 128);
    const double shift = 1000.0 * uniform01(rng) - 500.0;
    Epoch moved = e;
    for (auto& ch : moved.samples) {
      for (double& v : ch) v += shift;
    }
    const std::vector<Epoch> in_a{e};
    const std::vector<Epoch> in_b{moved};
    const FeatureMatrix a = extract_features(in_a);
    const FeatureMatrix b = extract_features(in_b);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < 3; ++k) CHECK(b.values[4 * c + k] == doctest::Approx(a.values[4 * c + k] + shift).epsilon(1e-9));
      CHECK(b.values[4 * c + 3] == doctest::Approx(a.values[4 * c + 3]).epsilon(1e-9));
    }
  }
}

TEST_CASE("metadata is copied from the epoch") {
  Epoch e = epoch_of({{1, 2}});
  e.start_s = 14.0;
  const std::vector<Epoch> in{e};
  const FeatureMatrix F = extract_features(in);
  CHECK(F.meta[0] == RowMeta{"p", "f.edf", 14.0});
}

TEST_CASE("bad epochs are refused") {
  const std::vector<Epoch> short_channel{epoch_of({{1}})};
  CHECK_THROWS_AS(extract_features(short_channel), DataError);
  const std::vector<Epoch> nan_sample{epoch_of({{1, NAN}})};
  CHECK_THROWS_AS(extract_features(nan_sample), DataError);
  const std::vector<Epoch> ragged{epoch_of({{1, 2}}), epoch_of({{1, 2}, {3, 4}})};
  CHECK_THROWS_AS(extract_features(ragged), ShapeError);
}

TEST_CASE("scaler gives zero mean and unit population std on its training rows") {
  const FeatureMatrix X = FeatureMatrix::from_rows({{1, 10, 7}, {2, 20, 7}, {3, 60, 7}});
  const Scaler s = fit_scaler(X);
  CHECK(s.mean[0] == 2.0);
  CHECK(s.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  const FeatureMatrix Z = apply_scaler(s, X);
  for (std::size_t j = 0; j < 2; ++j) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < 3; ++i) m += Z.row(i)[j];
    m /= 3;
    for (std::size_t i = 0; i < 3; ++i) v += (Z.row(i)[j] - m) * (Z.row(i)[j] - m);
    CHECK(m == doctest::Approx(0.0));
    CHECK(v / 3 == doctest::Approx(1.0));
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(Z.row(i)[2] == 0.0);
}

TEST_CASE("scaler fitted on train rows ignores any test rows") {
  Rng rng(5);
  FeatureMatrix train(3);
  for (int i = 0; i < 40; ++i) {
    const std::vector<double> r{uniform01(rng), uniform01(rng), uniform01(rng)};
    train.append_row(r);
  }
  const Scaler before = fit_scaler(train);
  FeatureMatrix test(3);
  const std::vector<double> outlier{1e6, -1e6, 3.0};
  test.append_row(outlier);
  const FeatureMatrix z = apply_scaler(before, test);
  CHECK(fit_scaler(train) == before);
  CHECK(z.row(0)[0] == doctest::Approx((1e6 - before.mean[0]) / before.stddev[0]));
  CHECK_THROWS_AS(apply_scaler(before, FeatureMatrix(2)), ShapeError);
  CHECK_THROWS_AS(fit_scaler(FeatureMatrix(3)), DataError);
}

TEST_CASE("feature CSV round-trips exactly") {
  Rng rng(9);
  Dataset d;
  d.X = FeatureMatrix(3);
  for (int i = 0; i < 25; ++i) {
    const std::vector<double> r{uniform01(rng) * 1e-7, -uniform01(rng) * 1e9, 0.1 * i};
    d.X.append_row(r, RowMeta{"p" + std::to_string(i % 3), "p_01.edf", 2.0 * i});
    d.y.push_back(i % 4 == 0);
  }
  std::stringstream ss;
  write_feature_csv(ss, d);
  CHECK(ss.str().rfind("patient,file,start_s,label,f0,f1,f2\n", 0) == 0);
  const Dataset back = read_feature_csv(ss);
  CHECK(back.X == d.X);
  CHECK(back.y == d.y);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("malformed feature CSV is refused") {
  std::stringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_feature_csv(bad_header), DataError);
  std::stringstream bad_label("patient,file,start_s,label,f0\np,f,0,2,1.0\n");
  CHECK_THROWS_AS(read_feature_csv(bad_label), DataError);
  std::stringstream bad_number("patient,file,start_s,label,f0\np,f,0,1,abc\n");
  CHECK_THROWS_AS(read_feature_csv(bad_number), DataError);
}
