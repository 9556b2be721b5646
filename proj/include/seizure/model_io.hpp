#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "seizure/features.hpp"
#include "seizure/forest.hpp"
#include "seizure/knn.hpp"
#include "seizure/logreg.hpp"
#include "seizure/lstm.hpp"
#include "seizure/preprocess.hpp"
#include "seizure/svm.hpp"

namespace seizure {

/// Version written to the `spec_version` field of every artifact and report.
inline constexpr std::string_view kFormatVersion = "1.0";

enum class ModelKind { majority, knn, logreg, rf, svm, lstm };

std::string_view to_string(ModelKind k) noexcept;
ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(Task t) noexcept;
Task parse_task(std::string_view name);

/// Always predicts the most frequent training class.
struct MajorityModel {
  int majority_class = 0;
};

struct LstmModel {
  LstmParams params;
  std::size_t sequence_length = 10;
  LstmTrainConfig config;
  std::size_t best_epoch = 0;
};

using AnyModel = std::variant<MajorityModel, KnnModel, LogRegModel, RFModel, SVMModel, LstmModel>;

/// A fitted model plus everything needed to apply it to raw feature rows.
struct ModelArtifact {
  AnyModel model;
  Scaler scaler;
  Task task = Task::detection;
  double threshold = 0.5;
  std::vector<std::string> train_patients;
  std::vector<std::string> validation_patients;
  std::vector<std::string> test_patients;

  ModelKind kind() const noexcept;
};

/// JSON document with the fields `model_type`, `spec_version`, `config`
/// (hyperparameters) and `params` (fitted values). Doubles are written in
/// shortest round-trip form so a reloaded model predicts bit-identically.
std::string serialize_model(const ModelArtifact& a);
ModelArtifact parse_model(std::string_view json_text);

void save_model(const std::filesystem::path& path, const ModelArtifact& a);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace seizure
