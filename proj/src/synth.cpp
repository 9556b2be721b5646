#include "seizure/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "seizure/error.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

// Offset of each mixture component from the class mean, in units of sigma_j.
constexpr double kMixtureOffset = 0.6;

struct FeatureModel {
  std::vector<double> base_mean;
  std::vector<double> sigma;
  std::vector<double> class_sign;
  std::vector<double> mixture_sign;
};

FeatureModel draw_feature_model(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  FeatureModel fm;
  for (std::size_t j = 0; j < d; ++j) {
    fm.base_mean.push_back(normal(rng));
    fm.sigma.push_back(scale(rng));
    fm.class_sign.push_back(uniform01(rng) < 0.5 ? -1.0 : 1.0);
    fm.mixture_sign.push_back(uniform01(rng) < 0.5 ? -1.0 : 1.0);
  }
  return fm;
}

std::string patient_name(std::size_t p, std::size_t n_patients) {
  const int width = std::max<int>(2, static_cast<int>(std::to_string(n_patients).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%0*zu", width, p + 1);
  return buf;
}

}  // namespace

void validate(const SynthConfig& cfg) {
  if (cfg.n_patients == 0) throw ConfigError("synth: n_patients must be positive");
  if (cfg.epochs_per_patient == 0) throw ConfigError("synth: epochs_per_patient must be positive");
  if (cfg.n_channels == 0) throw ConfigError("synth: n_channels must be positive");
  if (!(cfg.seizure_prevalence > 0.0 && cfg.seizure_prevalence < 1.0)) {
    throw ConfigError("synth: seizure_prevalence must lie in (0, 1)");
  }
  if (!(cfg.class_separation >= 0.0 && cfg.class_separation < 1.0)) {
    throw ConfigError("synth: class_separation must lie in [0, 1)");
  }
  if (!(cfg.patient_effect_scale >= 0.0) || !std::isfinite(cfg.patient_effect_scale)) {
    throw ConfigError("synth: patient_effect_scale must be nonnegative");
  }
  if (!(cfg.epoch_len_s > 0.0) || !std::isfinite(cfg.epoch_len_s)) throw ConfigError("synth: epoch_len_s must be positive");
  if (!(cfg.artifact_rate >= 0.0 && cfg.artifact_rate < 1.0)) throw ConfigError("synth: artifact_rate must lie in [0, 1)");
  if (cfg.raw_samples_per_epoch == 1) throw ConfigError("synth: raw epochs need at least 2 samples per channel");
}

Epoch synthesize_epoch(std::span<const double> feature_row, std::size_t n_channels, std::size_t samples,
                       std::uint64_t seed) {
  if (feature_row.size() != 4 * n_channels) throw ShapeError("synth: feature row does not hold 4 stats per channel");
  if (samples < 2) throw ConfigError("synth: raw epochs need at least 2 samples per channel");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Epoch e;
  e.samples.resize(n_channels);
  for (std::size_t c = 0; c < n_channels; ++c) {
    const double mean = feature_row[4 * c];
    const double sd = std::abs(feature_row[4 * c + 3]);
    std::vector<double> z(samples);
    double mu = 0.0;
    for (double& v : z) {
      v = normal(rng);
      mu += v;
    }
    mu /= static_cast<double>(samples);
    double ss = 0.0;
    for (double& v : z) {
      v -= mu;
      ss += v * v;
    }
    const double norm = std::sqrt(ss / static_cast<double>(samples));
    auto& out = e.samples[c];
    out.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) out[i] = mean + (norm > 0.0 ? sd * z[i] / norm : 0.0);
  }
  return e;
}

SynthData generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  const std::size_t d = 4 * cfg.n_channels;
  const std::size_t per = cfg.epochs_per_patient;
  const FeatureModel fm = draw_feature_model(d, derive_seed(cfg.seed, 0));
  const double within = std::sqrt(1.0 - kMixtureOffset * kMixtureOffset);

  SynthData out;
  Dataset& ds = out.data;
  ds.X = FeatureMatrix(d);
  ds.X.values.resize(cfg.n_patients * per * d);
  ds.X.meta.resize(cfg.n_patients * per);
  ds.y.resize(cfg.n_patients * per);

#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < cfg.n_patients; ++p) {
    Rng rng(derive_seed(cfg.seed, p + 1));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> offset(d), deviation(d);
    for (std::size_t j = 0; j < d; ++j) offset[j] = cfg.patient_effect_scale * fm.sigma[j] * normal(rng);
    for (std::size_t j = 0; j < d; ++j) {
      deviation[j] = cfg.patient_effect_scale * cfg.class_separation * fm.sigma[j] * normal(rng);
    }
    // Baseline offsets carry no seizure signature: remove their component
    // along the class-shift direction.
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dot += offset[j] * fm.sigma[j] * fm.class_sign[j];
      norm2 += fm.sigma[j] * fm.sigma[j];
    }
    for (std::size_t j = 0; j < d; ++j) offset[j] -= dot / norm2 * fm.sigma[j] * fm.class_sign[j];
    const std::string patient = patient_name(p, cfg.n_patients);
    const std::string file = patient + "_01.edf";

    for (std::size_t i = 0; i < per; ++i) {
      const std::size_t r = p * per + i;
      const int label = uniform01(rng) < cfg.seizure_prevalence ? 1 : 0;
      const double component = uniform01(rng) < 0.5 ? -1.0 : 1.0;
      const bool artifact = label == 0 && uniform01(rng) < cfg.artifact_rate;
      double* row = ds.X.values.data() + r * d;
      for (std::size_t j = 0; j < d; ++j) {
        double v = fm.base_mean[j] + offset[j];
        if (label == 1 || artifact) v += cfg.class_separation * fm.sigma[j] * fm.class_sign[j];
        if (label == 1) v += deviation[j];
        v += component * kMixtureOffset * fm.sigma[j] * fm.mixture_sign[j];
        v += within * fm.sigma[j] * normal(rng);
        row[j] = v;
      }
      ds.y[r] = label;
      ds.X.meta[r] = RowMeta{patient, file, static_cast<double>(i) * cfg.epoch_len_s, false, SplitTag::none};
    }
  }

  if (cfg.raw_samples_per_epoch > 0) {
    out.epochs.resize(ds.size());
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < ds.size(); ++r) {
      Epoch e = synthesize_epoch(ds.X.row(r), cfg.n_channels, cfg.raw_samples_per_epoch,
                                 derive_seed(derive_seed(cfg.seed, cfg.n_patients + 1), r));
      e.patient_id = ds.X.meta[r].patient;
      e.file_name = ds.X.meta[r].file;
      e.start_s = ds.X.meta[r].start_s;
      e.duration_s = cfg.epoch_len_s;
      out.epochs[r] = std::move(e);
    }
  }
  return out;
}

}  // namespace seizure
