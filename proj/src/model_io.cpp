#include "seizure/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "seizure/error.hpp"

namespace seizure {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json matrix_json(const FeatureMatrix& X) { return json{{"cols", X.cols}, {"values", X.values}}; }

FeatureMatrix matrix_from(const json& j) {
  FeatureMatrix X(j.at("cols").get<std::size_t>());
  X.values = j.at("values").get<std::vector<double>>();
  if (X.cols == 0 || X.values.size() % X.cols != 0) throw DataError("model file: matrix values do not fill whole rows");
  X.meta.resize(X.values.size() / X.cols);
  for (RowMeta& m : X.meta) m.split = SplitTag::train;
  return X;
}

json knn_json(const KnnModel& m, json& config) {
  config = {{"k", m.config.k}, {"balanced_weights", m.config.balanced_weights}};
  return {{"X", matrix_json(m.X)}, {"y", m.y}, {"class_weights", m.class_weights}};
}

KnnModel knn_from(const json& config, const json& params) {
  KnnModel m;
  m.config.k = config.at("k").get<std::size_t>();
  m.config.balanced_weights = config.at("balanced_weights").get<bool>();
  m.X = matrix_from(params.at("X"));
  m.y = params.at("y").get<std::vector<int>>();
  m.class_weights = params.at("class_weights").get<std::array<double, 2>>();
  if (m.y.size() != m.X.rows()) throw DataError("model file: KNN labels do not match stored rows");
  return m;
}

json logreg_json(const LogRegModel& m, json& config) {
  const LogRegConfig& c = m.config;
  config = {{"learning_rate", c.learning_rate}, {"l2_lambda", c.l2_lambda},       {"max_iters", c.max_iters},
            {"tolerance", c.tolerance},         {"class_weights", c.class_weights}, {"balanced_weights", c.balanced_weights},
            {"seed", c.seed}};
  return {{"weights", m.weights}, {"bias", m.bias}, {"iterations", m.iterations}, {"converged", m.converged}};
}

LogRegModel logreg_from(const json& config, const json& params) {
  LogRegModel m;
  LogRegConfig& c = m.config;
  c.learning_rate = config.at("learning_rate").get<double>();
  c.l2_lambda = config.at("l2_lambda").get<double>();
  c.max_iters = config.at("max_iters").get<std::size_t>();
  c.tolerance = config.at("tolerance").get<double>();
  c.class_weights = config.at("class_weights").get<std::array<double, 2>>();
  c.balanced_weights = config.at("balanced_weights").get<bool>();
  c.seed = config.at("seed").get<std::uint64_t>();
  m.weights = params.at("weights").get<std::vector<double>>();
  m.bias = params.at("bias").get<double>();
  m.iterations = params.at("iterations").get<std::size_t>();
  m.converged = params.at("converged").get<bool>();
  return m;
}

json rf_json(const RFModel& m, json& config) {
  const ForestConfig& c = m.config;
  config = {{"n_trees", c.n_trees},         {"max_depth", c.max_depth}, {"min_samples_split", c.min_samples_split},
            {"max_features", c.max_features}, {"bootstrap", c.bootstrap}, {"seed", c.seed}};
  json trees = json::array();
  for (const DecisionTree& t : m.trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.counts[0], n.counts[1]});
    trees.push_back(std::move(nodes));
  }
  return {{"n_features", m.n_features}, {"trees", std::move(trees)}};
}

RFModel rf_from(const json& config, const json& params) {
  RFModel m;
  ForestConfig& c = m.config;
  c.n_trees = config.at("n_trees").get<std::size_t>();
  c.max_depth = config.at("max_depth").get<std::size_t>();
  c.min_samples_split = config.at("min_samples_split").get<std::size_t>();
  c.max_features = config.at("max_features").get<std::size_t>();
  c.bootstrap = config.at("bootstrap").get<bool>();
  c.seed = config.at("seed").get<std::uint64_t>();
  m.n_features = params.at("n_features").get<std::size_t>();
  for (const json& jt : params.at("trees")) {
    DecisionTree t;
    for (const json& jn : jt) {
      TreeNode n;
      n.feature = jn.at(0).get<int>();
      n.threshold = jn.at(1).get<double>();
      n.left = jn.at(2).get<int>();
      n.right = jn.at(3).get<int>();
      n.counts = {jn.at(4).get<std::uint32_t>(), jn.at(5).get<std::uint32_t>()};
      t.nodes.push_back(n);
    }
    const auto count = static_cast<int>(t.nodes.size());
    for (const TreeNode& n : t.nodes) {
      if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count ||
                           static_cast<std::size_t>(n.feature) >= m.n_features)) {
        throw DataError("model file: tree node references a missing child or feature");
      }
    }
    if (t.nodes.empty()) throw DataError("model file: empty tree");
    m.trees.push_back(std::move(t));
  }
  return m;
}

json svm_json(const SVMModel& m, json& config) {
  config = {{"C", m.C}, {"gamma", m.gamma}};
  return {{"dim", m.dim},       {"support_vectors", m.support_vectors}, {"alphas", m.alphas}, {"labels", m.labels},
          {"bias", m.bias},     {"converged", m.converged},             {"passes", m.passes}};
}

SVMModel svm_from(const json& config, const json& params) {
  SVMModel m;
  m.C = config.at("C").get<double>();
  m.gamma = config.at("gamma").get<double>();
  m.dim = params.at("dim").get<std::size_t>();
  m.support_vectors = params.at("support_vectors").get<std::vector<double>>();
  m.alphas = params.at("alphas").get<std::vector<double>>();
  m.labels = params.at("labels").get<std::vector<int>>();
  m.bias = params.at("bias").get<double>();
  m.converged = params.at("converged").get<bool>();
  m.passes = params.at("passes").get<std::size_t>();
  if (m.alphas.size() != m.labels.size() || m.support_vectors.size() != m.alphas.size() * m.dim) {
    throw DataError("model file: SVM arrays disagree in size");
  }
  return m;
}

constexpr const char* kGateNames[] = {"i", "f", "o", "g"};

json lstm_weights(const LstmParams& p) {
  json w;
  for (std::size_t g = 0; g < 4; ++g) {
    const auto gate = static_cast<LstmParams::Gate>(g);
    const auto W = p.gate_weights(gate);
    const auto b = p.gate_bias(gate);
    w[std::string("W_") + kGateNames[g]] = std::vector<double>(W.begin(), W.end());
    w[std::string("b_") + kGateNames[g]] = std::vector<double>(b.begin(), b.end());
  }
  const auto wo = p.w_out();
  w["w_out"] = std::vector<double>(wo.begin(), wo.end());
  w["b_out"] = p.b_out();
  return w;
}

LstmParams lstm_params_from(const json& dims, const json& w) {
  LstmParams p = LstmParams::zeros(dims.at("input").get<std::size_t>(), dims.at("hidden").get<std::size_t>());
  const std::size_t h = p.hidden_dim;
  auto fill = [&](const char* key, std::size_t offset, std::size_t n) {
    const auto v = w.at(key).get<std::vector<double>>();
    if (v.size() != n) throw DataError(std::string("model file: LSTM weight '") + key + "' has the wrong size");
    std::copy(v.begin(), v.end(), p.values.begin() + static_cast<std::ptrdiff_t>(offset));
  };
  for (std::size_t g = 0; g < 4; ++g) {
    fill(("W_" + std::string(kGateNames[g])).c_str(), g * h * p.concat_dim(), h * p.concat_dim());
    fill(("b_" + std::string(kGateNames[g])).c_str(), p.weight_count() + g * h, h);
  }
  fill("w_out", p.weight_count() + 4 * h, h);
  p.b_out() = w.at("b_out").get<double>();
  return p;
}

}  // namespace

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::majority: return "majority";
    case ModelKind::knn: return "knn";
    case ModelKind::logreg: return "logreg";
    case ModelKind::rf: return "rf";
    case ModelKind::svm: return "svm";
    case ModelKind::lstm: return "lstm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::majority, ModelKind::knn, ModelKind::logreg, ModelKind::rf, ModelKind::svm, ModelKind::lstm}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown model '" + std::string(name) + "' (expected majority, knn, logreg, rf, svm or lstm)");
}

std::string_view to_string(Task t) noexcept { return t == Task::detection ? "detection" : "prediction"; }

Task parse_task(std::string_view name) {
  if (name == "detection") return Task::detection;
  if (name == "prediction") return Task::prediction;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected detection or prediction)");
}

ModelKind ModelArtifact::kind() const noexcept { return static_cast<ModelKind>(model.index()); }

std::string serialize_model(const ModelArtifact& a) {
  json doc;
  doc["model_type"] = to_string(a.kind());
  doc["spec_version"] = kFormatVersion;
  json config = json::object();
  json params = std::visit(
      overloaded{
          [&](const MajorityModel& m) { return json{{"majority_class", m.majority_class}}; },
          [&](const KnnModel& m) { return knn_json(m, config); },
          [&](const LogRegModel& m) { return logreg_json(m, config); },
          [&](const RFModel& m) { return rf_json(m, config); },
          [&](const SVMModel& m) { return svm_json(m, config); },
          [&](const LstmModel& m) {
            const LstmTrainConfig& c = m.config;
            config = {{"hidden_dim", c.hidden_dim}, {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
                      {"batch_size", c.batch_size}, {"grad_clip_norm", c.grad_clip_norm}, {"seed", c.seed},
                      {"patience", c.patience},     {"sequence_length", m.sequence_length}};
            doc["dims"] = {{"input", m.params.input_dim}, {"hidden", m.params.hidden_dim}};
            doc["weights"] = lstm_weights(m.params);
            return json{{"best_epoch", m.best_epoch}};
          },
      },
      a.model);
  doc["config"] = std::move(config);
  doc["params"] = std::move(params);
  doc["scaler"] = {{"mean", a.scaler.mean}, {"std", a.scaler.stddev}};
  doc["task"] = to_string(a.task);
  doc["threshold"] = a.threshold;
  doc["split"] = {{"train", a.train_patients}, {"validation", a.validation_patients}, {"test", a.test_patients}};
  return doc.dump(2) + "\n";
}

ModelArtifact parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const auto version = doc.at("spec_version").get<std::string>();
    if (version != kFormatVersion) throw DataError("model file version " + version + " is not supported");
    ModelArtifact a;
    const ModelKind kind = parse_model_kind(doc.at("model_type").get<std::string>());
    const json& config = doc.at("config");
    const json& params = doc.at("params");
    switch (kind) {
      case ModelKind::majority: a.model = MajorityModel{params.at("majority_class").get<int>()}; break;
      case ModelKind::knn: a.model = knn_from(config, params); break;
      case ModelKind::logreg: a.model = logreg_from(config, params); break;
      case ModelKind::rf: a.model = rf_from(config, params); break;
      case ModelKind::svm: a.model = svm_from(config, params); break;
      case ModelKind::lstm: {
        LstmModel m;
        m.params = lstm_params_from(doc.at("dims"), doc.at("weights"));
        LstmTrainConfig& c = m.config;
        c.hidden_dim = config.at("hidden_dim").get<std::size_t>();
        c.learning_rate = config.at("learning_rate").get<double>();
        c.epochs = config.at("epochs").get<std::size_t>();
        c.batch_size = config.at("batch_size").get<std::size_t>();
        c.grad_clip_norm = config.at("grad_clip_norm").get<double>();
        c.seed = config.at("seed").get<std::uint64_t>();
        c.patience = config.at("patience").get<std::size_t>();
        m.sequence_length = config.at("sequence_length").get<std::size_t>();
        m.best_epoch = params.at("best_epoch").get<std::size_t>();
        a.model = std::move(m);
        break;
      }
    }
    a.scaler.mean = doc.at("scaler").at("mean").get<std::vector<double>>();
    a.scaler.stddev = doc.at("scaler").at("std").get<std::vector<double>>();
    if (a.scaler.mean.size() != a.scaler.stddev.size()) throw DataError("model file: scaler arrays differ in length");
    a.task = parse_task(doc.at("task").get<std::string>());
    a.threshold = doc.at("threshold").get<double>();
    const json& split = doc.at("split");
    a.train_patients = split.at("train").get<std::vector<std::string>>();
    a.validation_patients = split.at("validation").get<std::vector<std::string>>();
    a.test_patients = split.at("test").get<std::vector<std::string>>();
    return a;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelArtifact& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_model(a);
  if (!out) throw Error("failed writing " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace seizure
