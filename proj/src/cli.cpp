#include "seizure/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "seizure/edf.hpp"
#include "seizure/error.hpp"
#include "seizure/feature_csv.hpp"
#include "seizure/features.hpp"
#include "seizure/pipeline.hpp"
#include "seizure/preprocess.hpp"
#include "seizure/summary.hpp"
#include "seizure/synth.hpp"

namespace seizure::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string out = ".";
  std::uint64_t seed = 0;

  std::string data;
  bool synthetic = false;
  SynthConfig synth;

  std::string edf_dir;
  std::vector<std::string> summaries;
  double epoch_len = kDefaultEpochSeconds;
  std::string task = "detection";
  double horizon = kDefaultHorizonSeconds;
  bool highpass = false;
  double cutoff = 0.5;
  std::string demographics;

  std::string in_dir;
  bool pool_channels = false;

  std::string model = "logreg";
  PipelineConfig pipeline;
  std::string split = "holdout";
  std::vector<double> ratios{0.5, 0.25, 0.25};
  bool allow_leaky = false;
  std::size_t folds = 5;

  std::string model_file;
  std::vector<std::string> test_patients;
};

// ---------------------------------------------------------------- file output

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json metrics_json(const MetricsReport& m) {
  json j;
  j["n"] = m.total();
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["weighted_precision"] = m.weighted_precision;
  j["weighted_recall"] = m.weighted_recall;
  j["undefined"] = {{"precision", m.precision_undefined}, {"recall", m.recall_undefined}, {"f1", m.f1_undefined},
                    {"auc", !m.roc.has_value()}};
  j["auc"] = m.roc ? json(m.roc->auc) : json(nullptr);
  return j;
}

json summary_json(const MetricSummary& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

std::string roc_csv(const RocCurve& roc) {
  std::string s = "threshold,fpr,tpr\n";
  for (const RocPoint& p : roc.points) {
    s += (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + "," + format_double(p.fpr) +
         "," + format_double(p.tpr) + "\n";
  }
  return s;
}

std::string predictions_csv(const Evaluation& ev, bool with_labels) {
  std::string s = with_labels ? "patient,file,start_s,label,score,prediction\n" : "patient,file,start_s,score,prediction\n";
  for (std::size_t i = 0; i < ev.scores.size(); ++i) {
    const RowMeta& m = ev.meta[i];
    s += m.patient + "," + m.file + "," + format_double(m.start_s) + ",";
    if (with_labels) s += std::to_string(ev.labels[i]) + ",";
    s += format_double(ev.scores[i]) + "," + std::to_string(ev.predictions[i]) + "\n";
  }
  return s;
}

// ------------------------------------------------------------------ manifest

struct Manifest {
  std::string command;
  json config;
  json inputs = json::array();
  json outputs = json::array();
  json extra = json::object();

  void input(const fs::path& p) { inputs.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p.string())}}); }
  void output(const std::string& name) { outputs.push_back(name); }
};

json echo_options(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->get_type_size() == 0) {
      j[name] = opt->count() > 0;
      continue;
    }
    if (opt->count() == 0) {
      j[name] = opt->get_default_str();
      continue;
    }
    const auto& results = opt->results();
    if (results.size() == 1) {
      j[name] = results.front();
    } else {
      j[name] = results;
    }
  }
  return j;
}

void write_manifest(const fs::path& out, const Manifest& m, const Options& o) {
  json j;
  j["spec_version"] = kFormatVersion;
  j["command"] = m.command;
  j["seed"] = o.seed;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  for (const auto& [k, v] : m.extra.items()) j[k] = v;
  write_json(out / "manifest.json", j);
}

// ---------------------------------------------------------------- data input

Dataset load_data(const Options& o, Manifest& man) {
  if (o.synthetic == !o.data.empty()) throw ConfigError("give exactly one data source: --data <features.csv> or --synthetic");
  if (o.synthetic) {
    SynthConfig c = o.synth;
    c.seed = o.seed;
    return generate_synthetic(c).data;
  }
  if (!fs::exists(o.data)) throw DataError("data file not found: " + o.data);
  man.input(o.data);
  return read_feature_csv(fs::path(o.data));
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig pc = o.pipeline;
  pc.model.kind = parse_model_kind(o.model);
  pc.task = parse_task(o.task);
  pc.seed = o.seed;
  return pc;
}

std::array<double, 3> ratio_triple(const Options& o) {
  if (o.ratios.size() != 3) throw ConfigError("--ratios needs three values (train validation test)");
  return {o.ratios[0], o.ratios[1], o.ratios[2]};
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

// -------------------------------------------------------------------- synth

int cmd_synth(const Options& o, Manifest& man, std::ostream& out) {
  SynthConfig c = o.synth;
  c.seed = o.seed;
  c.epoch_len_s = o.epoch_len;
  SynthData sd = generate_synthetic(c);
  Dataset ds = std::move(sd.data);
  if (!sd.epochs.empty()) {
    FeatureMatrix X = extract_features(sd.epochs);
    ds.X = std::move(X);
  }
  const fs::path dir(o.out);
  ensure_dir(dir);
  write_feature_csv(dir / "features.csv", ds);
  man.output("features.csv");
  man.extra["synth"] = {{"n_patients", c.n_patients},
                        {"epochs_per_patient", c.epochs_per_patient},
                        {"seizure_prevalence", c.seizure_prevalence},
                        {"n_channels", c.n_channels},
                        {"class_separation", c.class_separation},
                        {"patient_effect_scale", c.patient_effect_scale},
                        {"artifact_rate", c.artifact_rate},
                        {"epoch_len_s", c.epoch_len_s},
                        {"raw_samples_per_epoch", c.raw_samples_per_epoch}};
  write_manifest(dir, man, o);
  out << "wrote " << ds.size() << " rows (" << ds.positives() << " seizure) x " << ds.X.cols << " features to "
      << (dir / "features.csv").string() << "\n";
  return exit_ok;
}

// ------------------------------------------------------------------- ingest

struct IngestSettings {
  fs::path edf_dir;
  double epoch_len = kDefaultEpochSeconds;
  Task task = Task::detection;
  double horizon = kDefaultHorizonSeconds;
  NoiseReduction noise;
};

std::vector<fs::path> find_files(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = lower(entry.path().filename().string());
    if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(fs::relative(entry.path(), dir));
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  return files;
}

std::vector<Epoch> load_epochs(const IngestSettings& s, const fs::path& rel) {
  Recording r = read_edf_file(s.edf_dir / rel);
  apply_noise_reduction(r, s.noise);
  const std::string name = rel.filename().string();
  std::vector<Epoch> epochs = slice_epochs(r, s.epoch_len, name);
  const std::string patient = patient_from_file_name(name);
  for (Epoch& e : epochs) e.patient_id = patient;
  return epochs;
}

LabeledEpochSet label_epochs(const IngestSettings& s, std::vector<Epoch> epochs, std::span<const SeizureInterval> seizures) {
  return s.task == Task::detection ? label_detection(std::move(epochs), seizures)
                                   : label_prediction(std::move(epochs), seizures, s.horizon);
}

void write_demographics(const fs::path& src, const std::set<std::string>& patients, const fs::path& dir, Manifest& man) {
  std::istringstream in(read_text(src));
  std::string line;
  if (!std::getline(in, line)) throw DataError("demographics file is empty");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split_line(line, delim);
  int pc = -1, gc = -1, ac = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = lower(header[i]);
    if (pc < 0 && (h.find("case") != std::string::npos || h.find("patient") != std::string::npos)) pc = static_cast<int>(i);
    if (gc < 0 && (h.find("gender") != std::string::npos || h.find("sex") != std::string::npos)) gc = static_cast<int>(i);
    if (ac < 0 && h.find("age") != std::string::npos) ac = static_cast<int>(i);
  }
  if (pc < 0 || gc < 0 || ac < 0) throw DataError("demographics header needs patient/case, gender and age columns");

  std::map<std::string, std::size_t> genders;
  std::map<int, std::size_t> bands;
  while (std::getline(in, line)) {
    const auto cells = split_line(line, delim);
    if (cells.size() <= static_cast<std::size_t>(std::max({pc, gc, ac}))) continue;
    if (!patients.empty() && !patients.count(cells[static_cast<std::size_t>(pc)])) continue;
    genders[cells[static_cast<std::size_t>(gc)]]++;
    const std::string& a = cells[static_cast<std::size_t>(ac)];
    double age = 0.0;
    const auto res = std::from_chars(a.data(), a.data() + a.size(), age);
    if (res.ec != std::errc() || age < 0.0) throw DataError("demographics: bad age '" + a + "'");
    bands[static_cast<int>(age / 5.0) * 5]++;
  }
  std::string g = "gender,patients\n";
  for (const auto& [k, n] : genders) g += k + "," + std::to_string(n) + "\n";
  std::string b = "age_band,patients\n";
  for (const auto& [k, n] : bands) b += std::to_string(k) + "-" + std::to_string(k + 4) + "," + std::to_string(n) + "\n";
  write_text(dir / "demographics_gender.csv", g);
  write_text(dir / "demographics_age.csv", b);
  man.input(src);
  man.output("demographics_gender.csv");
  man.output("demographics_age.csv");
}

int cmd_ingest(const Options& o, Manifest& man, std::ostream& out, std::ostream& err) {
  IngestSettings s;
  s.edf_dir = o.edf_dir;
  s.epoch_len = o.epoch_len;
  s.task = parse_task(o.task);
  s.horizon = o.horizon;
  s.noise = NoiseReduction{o.highpass, o.cutoff};
  if (!(s.epoch_len > 0.0)) throw ConfigError("--epoch-len must be positive");
  if (s.task == Task::prediction && !(s.horizon > 0.0)) throw ConfigError("--horizon must be positive");
  if (!fs::is_directory(s.edf_dir)) throw DataError("EDF directory not found: " + o.edf_dir);

  const std::vector<fs::path> edfs = find_files(s.edf_dir, ".edf");
  if (edfs.empty()) throw DataError("no EDF files found in " + o.edf_dir);
  std::map<std::string, fs::path> by_name;
  for (const fs::path& p : edfs) {
    if (!by_name.emplace(p.filename().string(), p).second) {
      throw DataError("two EDF files share the name " + p.filename().string());
    }
  }

  std::vector<fs::path> summary_paths;
  for (const std::string& p : o.summaries) summary_paths.emplace_back(p);
  if (summary_paths.empty()) {
    for (const fs::path& rel : find_files(s.edf_dir, "-summary.txt")) summary_paths.push_back(s.edf_dir / rel);
  }
  std::map<std::string, FileSeizures> seizures;
  for (const fs::path& p : summary_paths) {
    man.input(p);
    SeizureSummary sum = parse_seizure_summary(read_text(p));
    for (FileSeizures& f : sum.files) {
      if (!by_name.count(f.file_name)) {
        err << "warning: " << p.filename().string() << " lists " << f.file_name
            << ", which is not among the EDF files; its intervals are ignored\n";
        continue;
      }
      seizures[f.file_name] = std::move(f);
    }
  }

  const fs::path dir(o.out);
  ensure_dir(dir);
  std::string epochs_csv = "patient,file,start_s,label\n";
  json files = json::array();
  std::set<std::string> patients;
  std::size_t failed = 0, total_epochs = 0, total_pos = 0;
  for (const fs::path& rel : edfs) {
    const std::string name = rel.filename().string();
    json entry{{"file", name}, {"path", rel.generic_string()}, {"patient", patient_from_file_name(name)}};
    man.input(s.edf_dir / rel);
    try {
      const auto it = seizures.find(name);
      const std::vector<SeizureInterval> intervals = it == seizures.end() ? std::vector<SeizureInterval>{} : it->second.intervals;
      LabeledEpochSet set = label_epochs(s, load_epochs(s, rel), intervals);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < set.epochs.size(); ++i) {
        const Epoch& e = set.epochs[i];
        epochs_csv += e.patient_id + "," + name + "," + format_double(e.start_s) + "," + std::to_string(set.labels[i]) + "\n";
        pos += static_cast<std::size_t>(set.labels[i]);
      }
      entry["epochs"] = set.epochs.size();
      entry["positive"] = pos;
      entry["seizures"] = intervals.size();
      entry["declared_seizures"] = it == seizures.end() ? 0 : it->second.declared_count;
      total_epochs += set.epochs.size();
      total_pos += pos;
      patients.insert(patient_from_file_name(name));
      out << name << ": " << set.epochs.size() << " epochs, " << pos << " positive\n";
    } catch (const Error& e) {
      ++failed;
      entry["error"] = e.what();
      err << "error: " << name << ": " << e.what() << "\n";
    }
    files.push_back(std::move(entry));
  }
  if (failed == edfs.size()) throw DataError("all " + std::to_string(failed) + " EDF files failed to parse");

  write_text(dir / "epochs.csv", epochs_csv);
  man.output("epochs.csv");
  json report{{"spec_version", kFormatVersion},
              {"task", to_string(s.task)},
              {"files", files},
              {"total_epochs", total_epochs},
              {"total_positive", total_pos},
              {"failed_files", failed}};
  write_json(dir / "ingest_report.json", report);
  man.output("ingest_report.json");
  if (!o.demographics.empty()) write_demographics(o.demographics, patients, dir, man);
  man.extra["ingest"] = {{"edf_dir", s.edf_dir.generic_string()},
                         {"epoch_len_s", s.epoch_len},
                         {"task", to_string(s.task)},
                         {"horizon_s", s.horizon},
                         {"highpass", s.noise.highpass},
                         {"cutoff_hz", s.noise.cutoff_hz}};
  write_manifest(dir, man, o);
  out << "ingested " << edfs.size() - failed << " of " << edfs.size() << " files: " << total_epochs << " epochs, "
      << total_pos << " positive\n";
  return exit_ok;
}

// ----------------------------------------------------------------- featurize

int cmd_featurize(const Options& o, Manifest& man, std::ostream& out, std::ostream& err) {
  const fs::path in(o.in_dir);
  const fs::path manifest_path = in / "manifest.json";
  json im;
  try {
    im = json::parse(read_text(manifest_path));
  } catch (const json::exception& e) {
    throw DataError("cannot read ingest manifest " + manifest_path.string() + ": " + e.what());
  }
  if (!im.contains("ingest")) throw DataError(manifest_path.string() + " is not an ingest manifest");
  const json& ing = im.at("ingest");
  IngestSettings s;
  s.edf_dir = ing.at("edf_dir").get<std::string>();
  s.epoch_len = ing.at("epoch_len_s").get<double>();
  s.task = parse_task(ing.at("task").get<std::string>());
  s.horizon = ing.at("horizon_s").get<double>();
  s.noise = NoiseReduction{ing.at("highpass").get<bool>(), ing.at("cutoff_hz").get<double>()};

  // (file, start) -> label, and file -> relative path, from the ingest output.
  std::map<std::pair<std::string, std::string>, int> labels;
  std::vector<std::string> order;
  std::map<std::string, fs::path> paths;
  const json report = json::parse(read_text(in / "ingest_report.json"));
  for (const json& f : report.at("files")) {
    if (f.contains("error")) continue;
    order.push_back(f.at("file").get<std::string>());
    paths[order.back()] = f.at("path").get<std::string>();
  }
  man.input(in / "epochs.csv");
  std::istringstream csv(read_text(in / "epochs.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    const auto cells = split_line(line, ',');
    if (cells.size() != 4) throw DataError("epochs.csv: malformed line '" + line + "'");
    labels[{cells[1], cells[2]}] = cells[3] == "1" ? 1 : 0;
  }

  const ChannelPooling pooling = o.pool_channels ? ChannelPooling::pooled : ChannelPooling::per_channel;
  Dataset ds;
  bool first = true;
  for (const std::string& name : order) {
    std::vector<Epoch> kept;
    std::vector<int> y;
    for (Epoch& e : load_epochs(s, paths.at(name))) {
      const auto it = labels.find({name, format_double(e.start_s)});
      if (it == labels.end()) continue;
      y.push_back(it->second);
      kept.push_back(std::move(e));
    }
    if (kept.empty()) continue;
    FeatureMatrix X = extract_features(kept, pooling);
    if (first) {
      ds.X = FeatureMatrix(X.cols);
      first = false;
    } else if (X.cols != ds.X.cols) {
      err << "warning: " << name << " has " << X.cols << " feature columns, expected " << ds.X.cols << "; skipped\n";
      continue;
    }
    for (std::size_t i = 0; i < X.rows(); ++i) ds.X.append_row(X.row(i), X.meta[i]);
    ds.y.insert(ds.y.end(), y.begin(), y.end());
    out << name << ": " << X.rows() << " feature rows\n";
  }
  if (ds.size() == 0) throw DataError("no epochs to featurize");

  const fs::path dir(o.out);
  ensure_dir(dir);
  write_feature_csv(dir / "features.csv", ds);
  man.output("features.csv");
  write_manifest(dir, man, o);
  out << "wrote " << ds.size() << " rows x " << ds.X.cols << " features\n";
  return exit_ok;
}

// -------------------------------------------------------- train / eval / cv

json split_json(const SplitPlan& p, const std::string& mode) {
  return {{"mode", mode}, {"seed", p.seed}, {"train", p.train}, {"validation", p.validation}, {"test", p.test}};
}

int cmd_train(const Options& o, Manifest& man, std::ostream& out) {
  const Dataset data = load_data(o, man);
  const PipelineConfig pc = pipeline_config(o);
  HoldoutResult r;
  if (o.split == "holdout") {
    r = run_holdout(data, ratio_triple(o), o.seed, pc);
  } else if (o.split == "record") {
    if (!o.allow_leaky) {
      throw ConfigError("--split record puts rows of one patient on both sides; pass --allow-leaky-split to run it anyway");
    }
    r = run_record_holdout(data, ratio_triple(o), o.seed, pc);
  } else {
    throw ConfigError("unknown --split '" + o.split + "' (expected holdout or record)");
  }

  const fs::path dir(o.out);
  ensure_dir(dir);
  save_model(dir / "model.json", r.model);
  man.output("model.json");
  json report;
  report["spec_version"] = kFormatVersion;
  report["model_type"] = to_string(pc.model.kind);
  report["smote"] = pc.use_smote;
  report["split"] = split_json(r.plan, o.split);
  report["validation"] = r.validation.labels.empty() ? json(nullptr) : metrics_json(r.validation.report);
  if (o.split == "record") report["test"] = metrics_json(r.test.report);
  write_json(dir / "train_report.json", report);
  man.output("train_report.json");
  write_manifest(dir, man, o);

  out << "trained " << to_string(pc.model.kind) << " on " << r.plan.train.size() << " patients\n";
  if (!r.validation.labels.empty()) {
    out << "validation: accuracy " << r.validation.report.accuracy << ", recall " << r.validation.report.recall << "\n";
  }
  return exit_ok;
}

int cmd_eval(const Options& o, Manifest& man, std::ostream& out) {
  man.input(o.model_file);
  const ModelArtifact model = load_model(o.model_file);
  const Dataset data = load_data(o, man);
  const std::vector<std::string>& patients = o.test_patients.empty() ? model.test_patients : o.test_patients;
  if (patients.empty()) throw ConfigError("no test patients: the model file lists none and --test-patients is empty");
  const Dataset test = tag_rows(data.select(rows_for_patients(data.X, patients)), SplitTag::test);
  if (test.size() == 0) throw DataError("no rows belong to the test patients");
  const Evaluation ev = evaluate_model(model, test, o.allow_leaky ? LeakagePolicy::allow : LeakagePolicy::enforce);

  const fs::path dir(o.out);
  ensure_dir(dir);
  json report = metrics_json(ev.report);
  report["spec_version"] = kFormatVersion;
  report["model_type"] = to_string(model.kind());
  report["test_patients"] = patients;
  write_json(dir / "metrics.json", report);
  man.output("metrics.json");
  if (ev.report.roc) {
    write_text(dir / "roc.csv", roc_csv(*ev.report.roc));
    man.output("roc.csv");
  }
  write_text(dir / "predictions.csv", predictions_csv(ev, true));
  man.output("predictions.csv");
  write_manifest(dir, man, o);

  out << "accuracy " << ev.report.accuracy << ", precision " << ev.report.precision << ", recall " << ev.report.recall
      << ", f1 " << ev.report.f1;
  if (ev.report.roc) out << ", auc " << ev.report.roc->auc;
  out << "\n";
  return exit_ok;
}

int cmd_cv(const Options& o, Manifest& man, std::ostream& out) {
  const Dataset data = load_data(o, man);
  const PipelineConfig pc = pipeline_config(o);
  const CvResult cv = run_cv(data, o.folds, o.seed, pc);

  const fs::path dir(o.out);
  ensure_dir(dir);
  std::string table = "fold,n,accuracy,precision,recall,f1,auc\n";
  for (std::size_t i = 0; i < cv.folds.size(); ++i) {
    const MetricsReport& m = cv.reports[i];
    json fold = metrics_json(m);
    fold["spec_version"] = kFormatVersion;
    fold["fold"] = i + 1;
    fold["train_patients"] = cv.folds[i].train;
    fold["test_patients"] = cv.folds[i].test;
    const std::string name = "fold_" + std::to_string(i + 1) + ".json";
    write_json(dir / name, fold);
    man.output(name);
    table += std::to_string(i + 1) + "," + std::to_string(m.total()) + "," + format_double(m.accuracy) + "," +
             format_double(m.precision) + "," + format_double(m.recall) + "," + format_double(m.f1) + "," +
             (m.roc ? format_double(m.roc->auc) : std::string()) + "\n";
  }
  write_text(dir / "cv_folds.csv", table);
  man.output("cv_folds.csv");

  const CvSummary& s = cv.summary;
  json summary{{"spec_version", kFormatVersion},
               {"model_type", to_string(pc.model.kind)},
               {"folds", s.folds},
               {"accuracy", summary_json(s.accuracy)},
               {"precision", summary_json(s.precision)},
               {"recall", summary_json(s.recall)},
               {"f1", summary_json(s.f1)},
               {"auc", summary_json(s.auc)},
               {"weighted_precision", summary_json(s.weighted_precision)},
               {"weighted_recall", summary_json(s.weighted_recall)}};
  write_json(dir / "cv_summary.json", summary);
  const std::string text = format_cv_summary(s);
  write_text(dir / "cv_summary.txt", text);
  man.output("cv_summary.json");
  man.output("cv_summary.txt");
  write_manifest(dir, man, o);
  out << text;
  return exit_ok;
}

int cmd_predict(const Options& o, Manifest& man, std::ostream& out) {
  man.input(o.model_file);
  const ModelArtifact model = load_model(o.model_file);
  const Dataset data = load_data(o, man);
  const Evaluation ev = score_rows(model, data, o.allow_leaky ? LeakagePolicy::allow : LeakagePolicy::enforce);
  const fs::path dir(o.out);
  ensure_dir(dir);
  write_text(dir / "predictions.csv", predictions_csv(ev, false));
  man.output("predictions.csv");
  write_manifest(dir, man, o);
  const auto pos = std::count(ev.predictions.begin(), ev.predictions.end(), 1);
  out << "scored " << ev.predictions.size() << " rows, " << pos << " predicted positive\n";
  return exit_ok;
}

// ------------------------------------------------------------------- options

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Feature CSV (patient,file,start_s,label,f0..)");
  sub->add_flag("--synthetic", o.synthetic, "Generate the synthetic dataset in memory instead of reading --data");
}

void add_synth_options(CLI::App* sub, Options& o) {
  sub->add_option("--patients", o.synth.n_patients, "Number of patients")->capture_default_str();
  sub->add_option("--epochs-per-patient", o.synth.epochs_per_patient, "Epochs per patient")->capture_default_str();
  sub->add_option("--prevalence", o.synth.seizure_prevalence, "Fraction of seizure epochs")->capture_default_str();
  sub->add_option("--channels", o.synth.n_channels, "Channels (4 features each)")->capture_default_str();
  sub->add_option("--separation", o.synth.class_separation, "Class mean shift in pooled-std units")->capture_default_str();
  sub->add_option("--patient-effect", o.synth.patient_effect_scale, "Scale of per-patient offsets")->capture_default_str();
  sub->add_option("--artifact-rate", o.synth.artifact_rate, "Fraction of non-seizure rows with a seizure-like shift")->capture_default_str();
}

void add_model_options(CLI::App* sub, Options& o) {
  PipelineConfig& p = o.pipeline;
  sub->add_option("--model", o.model, "majority, knn, logreg, rf, svm or lstm")->capture_default_str();
  sub->add_option("--task", o.task, "detection or prediction (recorded in the model)")->capture_default_str();
  sub->add_option("--threshold", p.threshold, "Probability threshold for logreg/lstm")->capture_default_str();
  sub->add_flag("--smote", p.use_smote, "Oversample the training side (SMOTE; window duplication for lstm)");
  sub->add_option("--smote-k", p.smote.k_neighbors, "SMOTE neighbours")->capture_default_str();
  sub->add_option("--smote-ratio", p.smote.target_ratio, "Minority/majority ratio after SMOTE")->capture_default_str();
  sub->add_option("--k", p.model.knn.k, "KNN neighbours")->capture_default_str();
  sub->add_flag("--knn-balanced", p.model.knn.balanced_weights, "Inverse-frequency KNN vote weights");
  sub->add_option("--lr", p.model.logreg.learning_rate, "Logistic regression step size")->capture_default_str();
  sub->add_option("--l2", p.model.logreg.l2_lambda, "Logistic regression L2 penalty")->capture_default_str();
  sub->add_option("--max-iters", p.model.logreg.max_iters, "Logistic regression iterations")->capture_default_str();
  sub->add_option("--tol", p.model.logreg.tolerance, "Logistic regression gradient tolerance")->capture_default_str();
  sub->add_flag("--balanced-weights", p.model.logreg.balanced_weights, "Inverse-frequency class weights in the loss");
  sub->add_option("--trees", p.model.rf.n_trees, "Random forest trees")->capture_default_str();
  sub->add_option("--max-depth", p.model.rf.max_depth, "Tree depth limit (0 = none)")->capture_default_str();
  sub->add_option("--min-samples-split", p.model.rf.min_samples_split, "Smallest node that may split")->capture_default_str();
  sub->add_option("--max-features", p.model.rf.max_features, "Features tried per node (0 = floor(sqrt(d)))")->capture_default_str();
  sub->add_option("--C", p.model.svm.C, "SVM box constraint")->capture_default_str();
  sub->add_option("--gamma", p.model.svm.gamma, "RBF gamma (0 = 1/d)")->capture_default_str();
  sub->add_option("--svm-tol", p.model.svm.tol, "SMO KKT tolerance")->capture_default_str();
  sub->add_option("--max-passes", p.model.svm.max_passes, "SMO iteration budget in multiples of the training rows")->capture_default_str();
  sub->add_option("--svm-max-rows", p.model.svm.max_train_rows, "SVM training rows kept after subsampling")->capture_default_str();
  sub->add_option("--hidden", p.model.lstm.hidden_dim, "LSTM hidden units")->capture_default_str();
  sub->add_option("--lstm-lr", p.model.lstm.learning_rate, "LSTM SGD step size")->capture_default_str();
  sub->add_option("--lstm-epochs", p.model.lstm.epochs, "LSTM training epochs")->capture_default_str();
  sub->add_option("--batch-size", p.model.lstm.batch_size, "LSTM mini-batch size")->capture_default_str();
  sub->add_option("--clip", p.model.lstm.grad_clip_norm, "LSTM gradient norm clip")->capture_default_str();
  sub->add_option("--patience", p.model.lstm.patience, "LSTM early-stop patience (0 = off)")->capture_default_str();
  sub->add_option("--seq-len", p.model.sequence_length, "Epochs per LSTM sequence")->capture_default_str();
}

void add_leaky_flag(CLI::App* sub, Options& o) {
  sub->add_flag("--allow-leaky-split", o.allow_leaky, "Disable the patient leakage gate (demonstration only)");
}

int dispatch(CLI::App& app, const std::map<std::string, CLI::App*>& subs, Options& o, std::ostream& out,
             std::ostream& err) {
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    Manifest man;
    man.command = name;
    man.config = echo_options(app);
    man.config[name] = echo_options(*sub);
    if (name == "synth") return cmd_synth(o, man, out);
    if (name == "ingest") return cmd_ingest(o, man, out, err);
    if (name == "featurize") return cmd_featurize(o, man, out, err);
    if (name == "train") return cmd_train(o, man, out);
    if (name == "eval") return cmd_eval(o, man, out);
    if (name == "cv") return cmd_cv(o, man, out);
    if (name == "predict") return cmd_predict(o, man, out);
  }
  return exit_usage;
}

}  // namespace

std::string patient_from_file_name(std::string_view file_name) {
  std::string stem = fs::path(std::string(file_name)).stem().string();
  const auto cut = stem.find('_');
  if (cut != std::string::npos && cut > 0) stem.resize(cut);
  return stem;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Seizure detection and prediction toolkit"};
  app.name("seizure");
  app.set_config("--config", "", "TOML/INI file with option values ([<subcommand>] sections)");
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, CLI::App*> subs;
  auto* synth = subs["synth"] = app.add_subcommand("synth", "Write a synthetic feature dataset");
  add_synth_options(synth, o);
  synth->add_option("--epoch-len", o.epoch_len, "Epoch length in seconds")->capture_default_str();
  synth->add_option("--raw-samples", o.synth.raw_samples_per_epoch,
                    "Generate raw epochs with this many samples per channel and featurize them (0 = off)")
      ->capture_default_str();

  auto* ingest = subs["ingest"] = app.add_subcommand("ingest", "Epoch and label a directory of EDF recordings");
  ingest->add_option("--edf-dir", o.edf_dir, "Directory searched recursively for .edf files")->required();
  ingest->add_option("--summary", o.summaries, "Seizure summary files (default: *-summary.txt under --edf-dir)");
  ingest->add_option("--epoch-len", o.epoch_len, "Epoch length in seconds")->capture_default_str();
  ingest->add_option("--task", o.task, "detection or prediction")->capture_default_str();
  ingest->add_option("--horizon", o.horizon, "Preictal horizon in seconds (prediction)")->capture_default_str();
  ingest->add_flag("--highpass", o.highpass, "Apply the first-order high-pass filter before epoching");
  ingest->add_option("--highpass-cutoff", o.cutoff, "High-pass cutoff in Hz")->capture_default_str();
  ingest->add_option("--demographics", o.demographics, "Patient table (patient/case, gender, age) for CSV summaries");

  auto* featurize = subs["featurize"] = app.add_subcommand("featurize", "Compute epoch features from an ingest output");
  featurize->add_option("--in", o.in_dir, "Directory written by ingest")->required();
  featurize->add_flag("--pool-channels", o.pool_channels, "Four features over all channels instead of per channel");

  auto* train = subs["train"] = app.add_subcommand("train", "Fit a model on a patient-disjoint holdout split");
  add_data_options(train, o);
  add_synth_options(train, o);
  add_model_options(train, o);
  train->add_option("--split", o.split, "holdout (patient-disjoint) or record (row-level, leaky)")->capture_default_str();
  train->add_option("--ratios", o.ratios, "Train/validation/test fractions")->expected(3)->delimiter(',')->capture_default_str();
  add_leaky_flag(train, o);

  auto* eval = subs["eval"] = app.add_subcommand("eval", "Evaluate a model on its test patients");
  add_data_options(eval, o);
  add_synth_options(eval, o);
  eval->add_option("--model-file", o.model_file, "model.json written by train")->required();
  eval->add_option("--test-patients", o.test_patients, "Override the test patients")->delimiter(',');
  add_leaky_flag(eval, o);

  auto* cv = subs["cv"] = app.add_subcommand("cv", "Patient-wise k-fold cross-validation");
  add_data_options(cv, o);
  add_synth_options(cv, o);
  add_model_options(cv, o);
  cv->add_option("--folds", o.folds, "Number of folds")->capture_default_str();

  auto* predict = subs["predict"] = app.add_subcommand("predict", "Score feature rows with a trained model");
  add_data_options(predict, o);
  add_synth_options(predict, o);
  predict->add_option("--model-file", o.model_file, "model.json written by train")->required();
  add_leaky_flag(predict, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
  }

  try {
    return dispatch(app, subs, o, out, err);
  } catch (const LeakageError& e) {
    err << e.what() << "\n";
    return exit_leakage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace seizure::cli
