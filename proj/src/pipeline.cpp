#include "seizure/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seizure/error.hpp"
#include "seizure/features.hpp"
#include "seizure/rng.hpp"

namespace seizure {
namespace {

enum SeedStream : std::uint64_t { smote_stream = 1, logreg_stream, rf_stream, svm_stream, lstm_stream, record_stream };

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Dataset scaled(const Scaler& s, const Dataset& d) { return Dataset{apply_scaler(s, d.X), d.y}; }

SequenceSet sequences_of(const Dataset& d, std::size_t length) {
  if (d.y.empty()) return build_sequences(d.X, std::vector<int>(d.X.rows(), 0), length);
  return build_sequences(d.X, d.y, length);
}

void check_dataset(const Dataset& d, const char* what) {
  check_binary_labels(d.X, d.y);
  if (d.size() == 0) throw DataError(std::string(what) + " set has no rows");
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

Evaluation finish(Evaluation ev) {
  ev.report = compute_metrics(ev.labels, ev.predictions);
  const auto pos = std::count(ev.labels.begin(), ev.labels.end(), 1);
  if (pos > 0 && static_cast<std::size_t>(pos) < ev.labels.size()) ev.report.roc = roc_auc(ev.labels, ev.scores);
  return ev;
}

}  // namespace

Dataset tag_rows(Dataset data, SplitTag tag) {
  for (RowMeta& m : data.X.meta) m.split = tag;
  return data;
}

ModelArtifact train_model(const Dataset& train_raw, const Dataset& validation_raw, const PipelineConfig& cfg) {
  check_dataset(train_raw, "training");
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
  ModelArtifact art;
  art.task = cfg.task;
  art.threshold = cfg.threshold;
  art.train_patients = patients_of(train_raw.X);
  art.validation_patients = patients_of(validation_raw.X);
  art.scaler = fit_scaler(train_raw.X);
  const Dataset train = tag_rows(scaled(art.scaler, train_raw), SplitTag::train);

  if (cfg.model.kind == ModelKind::lstm) {
    LstmTrainConfig lc = cfg.model.lstm;
    lc.seed = derive_seed(cfg.seed, lstm_stream);
    SequenceSet tr = sequences_of(train, cfg.model.sequence_length);
    if (tr.size() == 0) throw DataError("no training file has " + std::to_string(cfg.model.sequence_length) + " epochs");
    if (cfg.use_smote) tr = balance_by_duplication(tr);
    SequenceSet val;
    if (validation_raw.size() > 0) val = sequences_of(scaled(art.scaler, validation_raw), cfg.model.sequence_length);
    LstmTrainResult res = lstm_train(tr, val, lc);
    art.model = LstmModel{std::move(res.params), cfg.model.sequence_length, lc, res.best_epoch};
    return art;
  }

  FeatureMatrix X = train.X;
  std::vector<int> y = train.y;
  if (cfg.use_smote) {
    SmoteConfig sc = cfg.smote;
    sc.seed = derive_seed(cfg.seed, smote_stream);
    SmoteResult r = smote(X, y, sc);
    X = std::move(r.X);
    y = std::move(r.y);
  }

  switch (cfg.model.kind) {
    case ModelKind::majority: {
      const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
      art.model = MajorityModel{ones * 2 > y.size() ? 1 : 0};
      break;
    }
    case ModelKind::knn: art.model = knn_fit(std::move(X), std::move(y), cfg.model.knn); break;
    case ModelKind::logreg: {
      LogRegConfig c = cfg.model.logreg;
      c.seed = derive_seed(cfg.seed, logreg_stream);
      art.model = logreg_fit(X, y, c);
      break;
    }
    case ModelKind::rf: {
      ForestConfig c = cfg.model.rf;
      c.seed = derive_seed(cfg.seed, rf_stream);
      art.model = rf_fit(X, y, c);
      break;
    }
    case ModelKind::svm: {
      SvmConfig c = cfg.model.svm;
      c.seed = derive_seed(cfg.seed, svm_stream);
      art.model = svm_fit_smo(X, y, c);
      break;
    }
    case ModelKind::lstm: break;
  }
  return art;
}

Evaluation score_rows(const ModelArtifact& model, const Dataset& rows, LeakagePolicy policy) {
  if (!rows.y.empty()) check_binary_labels(rows.X, rows.y);
  if (policy == LeakagePolicy::enforce) {
    const auto patients = patients_of(rows.X);
    assert_patient_disjoint(model.train_patients, patients);
    for (const RowMeta& m : rows.X.meta) {
      if (m.synthetic) throw LeakageError("leakage gate: scored rows include synthetic oversampled rows");
    }
  }
  const Dataset d = scaled(model.scaler, rows);
  Evaluation ev;
  const double thr = model.threshold;

  std::visit(overloaded{
                 [&](const MajorityModel& m) {
                   ev.scores.assign(d.X.rows(), static_cast<double>(m.majority_class));
                   ev.predictions.assign(d.X.rows(), m.majority_class);
                 },
                 [&](const KnnModel& m) {
                   ev.scores = knn_scores(m, d.X);
                   ev.predictions = knn_predict(m, d.X);
                 },
                 [&](const LogRegModel& m) {
                   ev.scores = logreg_predict_proba(m, d.X);
                   ev.predictions = logreg_predict(m, d.X, thr);
                 },
                 [&](const RFModel& m) {
                   ev.scores = rf_scores(m, d.X);
                   ev.predictions = rf_predict(m, d.X);
                 },
                 [&](const SVMModel& m) {
                   ev.scores = svm_decision(m, d.X);
                   ev.predictions = svm_predict(m, d.X);
                 },
                 [&](const LstmModel& m) {
                   const SequenceSet seqs = sequences_of(d, m.sequence_length);
                   LstmPrediction p = lstm_predict(m.params, seqs, thr);
                   ev.scores = std::move(p.probabilities);
                   ev.predictions = std::move(p.classes);
                   ev.labels = seqs.labels;
                   ev.meta = seqs.meta;
                 },
             },
             model.model);

  if (model.kind() != ModelKind::lstm) {
    ev.labels = d.y;
    ev.meta = d.X.meta;
  }
  return ev;
}

Evaluation evaluate_model(const ModelArtifact& model, const Dataset& test, LeakagePolicy policy) {
  check_dataset(test, "evaluation");
  Evaluation ev = score_rows(model, test, policy);
  if (ev.labels.empty()) throw DataError("evaluation produced no scored rows (files shorter than the sequence length?)");
  return finish(std::move(ev));
}

HoldoutResult run_holdout(const Dataset& data, std::array<double, 3> ratios, std::uint64_t split_seed,
                          const PipelineConfig& cfg) {
  check_dataset(data, "input");
  HoldoutResult out;
  out.plan = split_patients(patients_of(data.X), ratios, split_seed);
  const Dataset train = tag_rows(data.select(rows_for_patients(data.X, out.plan.train)), SplitTag::train);
  const Dataset val = tag_rows(data.select(rows_for_patients(data.X, out.plan.validation)), SplitTag::validation);
  const Dataset test = tag_rows(data.select(rows_for_patients(data.X, out.plan.test)), SplitTag::test);
  assert_patient_disjoint(train.X, test.X);
  assert_patient_disjoint(train.X, val.X);
  assert_patient_disjoint(val.X, test.X);

  out.model = train_model(train, val, cfg);
  out.model.test_patients = out.plan.test;
  if (val.size() > 0) out.validation = evaluate_model(out.model, val);
  out.test = evaluate_model(out.model, test);
  return out;
}

HoldoutResult run_record_holdout(const Dataset& data, std::array<double, 3> ratios, std::uint64_t split_seed,
                                 const PipelineConfig& cfg) {
  check_dataset(data, "input");
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const std::size_t n = data.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(split_seed, record_stream));
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  const std::size_t n_train = std::min(n, round_half_up(ratios[0] * static_cast<double>(n)));
  const std::size_t n_val = std::min(n - n_train, round_half_up(ratios[1] * static_cast<double>(n)));
  auto part = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> rows(idx.begin() + static_cast<std::ptrdiff_t>(from), idx.begin() + static_cast<std::ptrdiff_t>(to));
    std::sort(rows.begin(), rows.end());
    return data.select(rows);
  };
  const Dataset train = tag_rows(part(0, n_train), SplitTag::train);
  const Dataset val = tag_rows(part(n_train, n_train + n_val), SplitTag::validation);
  const Dataset test = tag_rows(part(n_train + n_val, n), SplitTag::test);

  HoldoutResult out;
  out.plan.seed = split_seed;
  out.plan.train = patients_of(train.X);
  out.plan.validation = patients_of(val.X);
  out.plan.test = patients_of(test.X);
  out.model = train_model(train, val, cfg);
  out.model.test_patients = out.plan.test;
  if (val.size() > 0) out.validation = evaluate_model(out.model, val, LeakagePolicy::allow);
  out.test = evaluate_model(out.model, test, LeakagePolicy::allow);
  return out;
}

CvResult run_cv(const Dataset& data, std::size_t k, std::uint64_t split_seed, const PipelineConfig& cfg) {
  check_dataset(data, "input");
  CvResult out;
  out.folds = kfold_patients(patients_of(data.X), k, split_seed);
  for (const Fold& f : out.folds) {
    const Dataset train = tag_rows(data.select(rows_for_patients(data.X, f.train)), SplitTag::train);
    const Dataset test = tag_rows(data.select(rows_for_patients(data.X, f.test)), SplitTag::test);
    assert_patient_disjoint(train.X, test.X);
    ModelArtifact m = train_model(train, Dataset{FeatureMatrix(data.X.cols), {}}, cfg);
    m.test_patients = f.test;
    out.evaluations.push_back(evaluate_model(m, test));
    out.reports.push_back(out.evaluations.back().report);
  }
  out.summary = summarize_folds(out.reports);
  return out;
}

}  // namespace seizure
