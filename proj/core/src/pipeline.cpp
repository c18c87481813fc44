#include "bsbench/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bsbench/dataset.hpp"
#include "bsbench/wav.hpp"

namespace bsb {

namespace fs = std::filesystem;
using nlohmann::json;

void BenchConfig::validate() const {
  corpus.validate();
  window.validate();
  split_ratio.validate();
  gbdt.validate();
  mlp.validate();
  if (models.empty()) throw ConfigError("model roster is empty");
  for (const std::string& m : models)
    if (m != "gbdt-tabular" && m != "gbdt-mfcc-stats" && m != "mlp-tabular" &&
        m != "mlp-mfcc")
      throw ConfigError("unknown model: " + m);
  if (tasks.empty()) throw ConfigError("task set is empty");
  for (const std::string& t : tasks)
    if (t != "binary" && t != "five-class")
      throw ConfigError("unknown task: " + t);
  if (gbdt_profile != "paper" && gbdt_profile != "tuned")
    throw ConfigError("gbdt_profile must be \"paper\" or \"tuned\"");
  if (out_dir.empty()) throw ConfigError("out_dir is empty");
}

namespace {

std::array<double, 4> mixture_from_json(const json& j) {
  std::array<double, 4> mix{};
  mix[0] = j.at("SB").get<double>();
  mix[1] = j.at("MB").get<double>();
  mix[2] = j.at("CRS").get<double>();
  mix[3] = j.at("HS").get<double>();
  return mix;
}

}  // namespace

BenchConfig bench_config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  BenchConfig cfg;
  try {
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
    if (doc.contains("manifest"))
      cfg.manifest_path = doc["manifest"].get<std::string>();
    if (doc.contains("persist_corpus"))
      cfg.persist_corpus = doc["persist_corpus"].get<bool>();
    if (doc.contains("models"))
      cfg.models = doc["models"].get<std::vector<std::string>>();
    if (doc.contains("tasks"))
      cfg.tasks = doc["tasks"].get<std::vector<std::string>>();
    if (doc.contains("gbdt_profile"))
      cfg.gbdt_profile = doc["gbdt_profile"].get<std::string>();

    if (doc.contains("corpus")) {
      const json& c = doc["corpus"];
      if (c.contains("n_subjects")) cfg.corpus.n_subjects = c["n_subjects"];
      if (c.contains("recording_len_s"))
        cfg.corpus.recording_len_s = c["recording_len_s"];
      if (c.contains("events_per_minute"))
        cfg.corpus.events_per_minute = c["events_per_minute"];
      if (c.contains("class_mixture"))
        cfg.corpus.class_mixture = mixture_from_json(c["class_mixture"]);
      if (c.contains("noise_floor_snr_db"))
        cfg.corpus.noise_floor_snr_db = c["noise_floor_snr_db"];
      if (c.contains("sample_rate_hz"))
        cfg.corpus.sample_rate_hz = c["sample_rate_hz"];
    }
    if (doc.contains("window")) {
      const json& w = doc["window"];
      if (w.contains("window_s")) cfg.window.window_s = w["window_s"];
      if (w.contains("stride_s")) cfg.window.stride_s = w["stride_s"];
    }
    if (doc.contains("split")) {
      const json& s = doc["split"];
      if (s.contains("train")) cfg.split_ratio.train = s["train"];
      if (s.contains("val")) cfg.split_ratio.val = s["val"];
      if (s.contains("test")) cfg.split_ratio.test = s["test"];
    }
    if (doc.contains("dsp")) {
      const json& d = doc["dsp"];
      if (d.contains("n_fft")) cfg.dsp.n_fft = d["n_fft"];
      if (d.contains("hop")) cfg.dsp.hop = d["hop"];
      if (d.contains("n_mels")) cfg.dsp.n_mels = d["n_mels"];
      if (d.contains("fmin_hz")) cfg.dsp.fmin_hz = d["fmin_hz"];
      if (d.contains("fmax_hz")) cfg.dsp.fmax_hz = d["fmax_hz"];
      if (d.contains("n_mfcc")) cfg.dsp.n_mfcc = d["n_mfcc"];
      if (d.contains("log_floor_eps")) cfg.dsp.log_floor_eps = d["log_floor_eps"];
    }
    if (doc.contains("gbdt")) {
      const json& g = doc["gbdt"];
      if (g.contains("max_depth")) cfg.gbdt.max_depth = g["max_depth"];
      if (g.contains("learning_rate")) cfg.gbdt.learning_rate = g["learning_rate"];
      if (g.contains("n_iterations")) cfg.gbdt.n_iterations = g["n_iterations"];
      if (g.contains("n_bins")) cfg.gbdt.n_bins = g["n_bins"];
      if (g.contains("l2_lambda")) cfg.gbdt.l2_lambda = g["l2_lambda"];
      if (g.contains("min_child_weight"))
        cfg.gbdt.min_child_weight = g["min_child_weight"];
    }
    if (doc.contains("mlp")) {
      const json& m = doc["mlp"];
      if (m.contains("hidden")) cfg.mlp.hidden = m["hidden"].get<std::vector<int>>();
      if (m.contains("epochs")) cfg.mlp.epochs = m["epochs"];
      if (m.contains("learning_rate")) cfg.mlp.learning_rate = m["learning_rate"];
      if (m.contains("batch_size")) cfg.mlp.batch_size = m["batch_size"];
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }

  // stage seeds always derive from the master seed
  cfg.corpus.seed = cfg.seed;
  cfg.gbdt.seed = derive_seed(cfg.seed, 303);
  cfg.mlp.seed = derive_seed(cfg.seed, 202);
  cfg.validate();
  return cfg;
}

BenchConfig bench_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return bench_config_from_json_text(ss.str());
}

std::string bench_config_to_json(const BenchConfig& cfg) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["out_dir"] = cfg.out_dir;
  doc["manifest"] = cfg.manifest_path;
  doc["persist_corpus"] = cfg.persist_corpus;
  doc["models"] = cfg.models;
  doc["tasks"] = cfg.tasks;
  doc["gbdt_profile"] = cfg.gbdt_profile;
  doc["corpus"] = {
      {"n_subjects", cfg.corpus.n_subjects},
      {"recording_len_s", cfg.corpus.recording_len_s},
      {"events_per_minute", cfg.corpus.events_per_minute},
      {"class_mixture",
       {{"SB", cfg.corpus.class_mixture[0]},
        {"MB", cfg.corpus.class_mixture[1]},
        {"CRS", cfg.corpus.class_mixture[2]},
        {"HS", cfg.corpus.class_mixture[3]}}},
      {"noise_floor_snr_db", cfg.corpus.noise_floor_snr_db},
      {"sample_rate_hz", cfg.corpus.sample_rate_hz},
      {"seed", cfg.corpus.seed}};
  doc["window"] = {{"window_s", cfg.window.window_s},
                   {"stride_s", cfg.window.stride_s}};
  doc["split"] = {{"train", cfg.split_ratio.train},
                  {"val", cfg.split_ratio.val},
                  {"test", cfg.split_ratio.test}};
  doc["dsp"] = {{"n_fft", cfg.dsp.n_fft},
                {"hop", cfg.dsp.hop},
                {"n_mels", cfg.dsp.n_mels},
                {"fmin_hz", cfg.dsp.fmin_hz},
                {"fmax_hz", cfg.dsp.fmax_hz},
                {"n_mfcc", cfg.dsp.n_mfcc},
                {"log_floor_eps", cfg.dsp.log_floor_eps}};
  doc["gbdt"] = {{"max_depth", cfg.gbdt.max_depth},
                 {"learning_rate", cfg.gbdt.learning_rate},
                 {"n_iterations", cfg.gbdt.n_iterations},
                 {"n_bins", cfg.gbdt.n_bins},
                 {"l2_lambda", cfg.gbdt.l2_lambda},
                 {"min_child_weight", cfg.gbdt.min_child_weight}};
  doc["mlp"] = {{"hidden", cfg.mlp.hidden},
                {"epochs", cfg.mlp.epochs},
                {"learning_rate", cfg.mlp.learning_rate},
                {"batch_size", cfg.mlp.batch_size}};
  return doc.dump(2);
}

GbdtConfig gbdt_profile_config(const BenchConfig& cfg) {
  GbdtConfig g = cfg.gbdt;
  if (cfg.gbdt_profile == "tuned") {
    g.learning_rate = 0.3;
    g.n_iterations = 200;
  }
  return g;
}

bool model_uses_kind(const std::string& model, const std::string& kind) {
  if (model == "gbdt-tabular" || model == "mlp-tabular")
    return kind == "tabular";
  if (model == "gbdt-mfcc-stats") return kind == "mfcc-stats";
  if (model == "mlp-mfcc") return kind == "mfcc-flat";
  return false;
}

std::vector<std::string> kinds_for_models(
    const std::vector<std::string>& models) {
  std::vector<std::string> kinds;
  for (const char* kind : {"tabular", "mfcc-stats", "mfcc-flat"})
    for (const std::string& m : models)
      if (model_uses_kind(m, kind)) {
        kinds.push_back(kind);
        break;
      }
  return kinds;
}

int binary_label(PatternLabel label) {
  return label == PatternLabel::NonBS ? 0 : 1;
}

std::vector<std::string> task_class_names(const std::string& task) {
  if (task == "binary") return {"None", "BS"};
  if (task == "five-class") return {"None", "SB", "MB", "CRS", "HS"};
  throw ConfigError("unknown task: " + task);
}

int task_label_index(const std::string& task, PatternLabel label) {
  if (task == "binary") return binary_label(label);
  if (task == "five-class") return static_cast<int>(label);
  throw ConfigError("unknown task: " + task);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoFailure("write failed: " + path);
}

void write_segments_csv(const std::string& path,
                        const std::vector<SegmentRecord>& segments) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << "wav_path,subject_id,origin_s,label\n";
  char buf[32];
  for (const SegmentRecord& s : segments) {
    std::snprintf(buf, sizeof(buf), "%.6f", s.origin_s);
    out << s.wav_path << "," << s.subject_id << "," << buf << ","
        << render_label(s.label) << "\n";
  }
  if (!out) throw IoFailure("write failed: " + path);
}

std::vector<SegmentRecord> read_segments_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty segments file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "wav_path,subject_id,origin_s,label")
    throw DataError(path + ": bad header");
  std::vector<SegmentRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    SegmentRecord rec;
    std::string origin, label;
    if (!std::getline(ss, rec.wav_path, ',') ||
        !std::getline(ss, rec.subject_id, ',') ||
        !std::getline(ss, origin, ',') || !std::getline(ss, label))
      throw DataError(path + ":" + std::to_string(row) + ": short row");
    rec.origin_s = std::stod(origin);
    rec.label = parse_label(label);
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename F>
  auto run(const std::string& stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        finish(stage, start);
      } else {
        auto result = f();
        finish(stage, start);
        return result;
      }
    } catch (const ConfigError& e) {
      throw ConfigError("stage " + stage + ": " + e.what());
    } catch (const TrainError& e) {
      throw TrainError("stage " + stage + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("stage " + stage + ": " + e.what());
    }
  }

 private:
  void finish(const std::string& stage,
              std::chrono::steady_clock::time_point start) {
    const auto end = std::chrono::steady_clock::now();
    sink_.push_back(
        {stage, std::chrono::duration<double>(end - start).count()});
  }

  std::vector<StageTiming>& sink_;
};

struct ExtractedData {
  std::vector<SegmentInfo> infos;
  // kind -> matrix rows aligned with infos
  std::map<std::string, FeatureMatrix> features;
};

ExtractedData extract_all(const BenchConfig& cfg, const std::string& out_dir,
                          std::map<std::string, std::string>& artifacts) {
  const std::vector<std::string> kinds = kinds_for_models(cfg.models);

  ExtractedData data;
  std::map<std::string, std::vector<double>> staging;
  std::map<std::string, std::size_t> n_cols;
  for (const std::string& kind : kinds) staging[kind] = {};

  DatasetManifest persisted_manifest;
  const bool synthetic = cfg.manifest_path.empty();
  const fs::path corpus_dir = fs::path(out_dir) / "corpus";
  if (synthetic && cfg.persist_corpus) fs::create_directories(corpus_dir);

  std::vector<AnnotatedRecording> external;
  std::size_t n_recordings;
  if (synthetic) {
    n_recordings = static_cast<std::size_t>(cfg.corpus.n_subjects);
  } else {
    external = load_manifest(cfg.manifest_path);
    n_recordings = external.size();
  }

  for (std::size_t i = 0; i < n_recordings; ++i) {
    AnnotatedRecording rec;
    if (synthetic) {
      Rng rng = corpus_subject_rng(cfg.corpus, static_cast<int>(i));
      rec = synth_recording(cfg.corpus, corpus_subject_id(static_cast<int>(i)),
                            rng);
      if (cfg.persist_corpus) {
        const std::string wav_name = rec.subject_id + ".wav";
        const std::string csv_name = rec.subject_id + ".csv";
        write_wav((corpus_dir / wav_name).string(), rec.waveform);
        write_annotations((corpus_dir / csv_name).string(), rec.events);
        persisted_manifest.entries.push_back(
            {wav_name, csv_name, rec.subject_id});
      }
    } else {
      rec = std::move(external[i]);
    }

    const std::vector<Segment> segments = segment_recording(rec, cfg.window);
    for (const Segment& seg : segments) {
      data.infos.push_back(to_info(seg));
      for (const std::string& kind : kinds) {
        std::vector<double> row;
        if (kind == "tabular")
          row = extract_features(seg, cfg.dsp);
        else if (kind == "mfcc-stats")
          row = extract_mfcc_stats(seg, cfg.dsp);
        else
          row = extract_mfcc_flat(seg, cfg.dsp);
        auto [it, inserted] = n_cols.emplace(kind, row.size());
        if (!inserted && it->second != row.size())
          throw DataError("inconsistent feature width for kind " + kind);
        staging[kind].insert(staging[kind].end(), row.begin(), row.end());
        data.features[kind].labels.push_back(seg.label);
        data.features[kind].subject_ids.push_back(seg.subject_id);
      }
    }
  }
  if (data.infos.empty()) throw DataError("no segments extracted");

  if (synthetic && cfg.persist_corpus) {
    const std::string manifest_path = (corpus_dir / "manifest.json").string();
    write_manifest(manifest_path, persisted_manifest);
    artifacts["corpus_manifest"] = manifest_path;
  }

  for (const std::string& kind : kinds) {
    FeatureMatrix& fm = data.features[kind];
    fm.values = Matrix(fm.labels.size(), n_cols[kind]);
    std::copy(staging[kind].begin(), staging[kind].end(),
              fm.values.data().begin());
    if (kind == "tabular")
      fm.spec = tabular_feature_spec();
    else if (kind == "mfcc-stats")
      fm.spec = mfcc_stats_spec(cfg.dsp);
    else
      fm.spec = mfcc_flat_spec(cfg.dsp, n_cols[kind] /
                                            static_cast<std::size_t>(cfg.dsp.n_mfcc));
  }
  return data;
}

Matrix gather_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(X.row(rows[i]), X.row(rows[i]) + X.cols(), out.row(i));
  return out;
}

std::vector<int> gather_labels(const std::vector<SegmentInfo>& infos,
                               const std::vector<std::size_t>& rows,
                               const std::string& task) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows)
    out.push_back(task_label_index(task, infos[r].label));
  return out;
}

std::string model_tag(const BenchConfig& cfg, const std::string& roster_entry) {
  if (roster_entry.rfind("gbdt", 0) == 0) return "gbdt[" + cfg.gbdt_profile + "]";
  return "mlp";
}

std::string feature_tag(const std::string& roster_entry) {
  if (roster_entry == "gbdt-tabular" || roster_entry == "mlp-tabular")
    return "tabular";
  if (roster_entry == "gbdt-mfcc-stats") return "mfcc-stats";
  return "mfcc-flat";
}

}  // namespace

RunRecord run_benchmark(const BenchConfig& cfg) {
  cfg.validate();

  RunRecord record;
  record.seed = cfg.seed;
  record.config_json = bench_config_to_json(cfg);
  StageClock clock(record.timings);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "provenance");
  fs::create_directories(out / "features");
  fs::create_directories(out / "models");
  fs::create_directories(out / "reports");
  write_text_file((out / "provenance" / "bench_config.json").string(),
                  record.config_json + "\n");

  ExtractedData data = clock.run("data", [&] {
    return extract_all(cfg, cfg.out_dir, record.artifacts);
  });

  const SplitAssignment split = clock.run("split", [&] {
    return stratified_group_split(data.infos, cfg.split_ratio,
                                  derive_seed(cfg.seed, 101));
  });
  {
    const std::string path = (out / "splits.json").string();
    write_split_json(path, split);
    record.artifacts["splits"] = path;
  }

  clock.run("features", [&] {
    for (const auto& [kind, fm] : data.features) {
      if (kind == "mfcc-flat") continue;  // too wide to be a useful CSV
      std::string name(kind);
      std::replace(name.begin(), name.end(), '-', '_');
      const std::string path = (out / "features" / (name + ".csv")).string();
      write_feature_csv(path, fm);
      record.artifacts["features:" + kind] = path;
    }
  });

  for (const std::string& task : cfg.tasks) {
    const std::vector<std::string> class_names = task_class_names(task);
    for (const std::string& entry : cfg.models) {
      const std::string kind = feature_tag(entry);
      const FeatureMatrix& fm = data.features.at(kind);
      const std::string stage_tag = entry + ":" + task;

      const auto& train_rows = split.segment_indices[0];
      const auto& val_rows = split.segment_indices[1];
      const auto& test_rows = split.segment_indices[2];

      const Matrix x_train = gather_rows(fm.values, train_rows);
      const std::vector<int> y_train =
          gather_labels(data.infos, train_rows, task);

      std::string model_json;
      Matrix probs[kNumSplits];
      clock.run("train:" + stage_tag, [&] {
        if (entry.rfind("gbdt", 0) == 0) {
          const GbdtModel model =
              train_gbdt(x_train, y_train, class_names, gbdt_profile_config(cfg));
          model_json = gbdt_to_json(model);
          probs[0] = predict_gbdt(model, x_train);
          probs[1] = predict_gbdt(model, gather_rows(fm.values, val_rows));
          probs[2] = predict_gbdt(model, gather_rows(fm.values, test_rows));
        } else {
          const Matrix x_val = gather_rows(fm.values, val_rows);
          const std::vector<int> y_val =
              gather_labels(data.infos, val_rows, task);
          TrainReport train_report;
          const MlpModel model = train_mlp(x_train, y_train, class_names,
                                           cfg.mlp, &train_report, &x_val,
                                           &y_val);
          model_json = mlp_to_json(model);
          probs[0] = predict_mlp(model, x_train);
          probs[1] = predict_mlp(model, x_val);
          probs[2] = predict_mlp(model, gather_rows(fm.values, test_rows));
        }
      });
      {
        std::string name = entry + "_" + task + ".json";
        std::replace(name.begin(), name.end(), '-', '_');
        const std::string path = (out / "models" / name).string();
        write_text_file(path, model_json + "\n");
        record.artifacts["model:" + stage_tag] = path;
      }

      clock.run("eval:" + stage_tag, [&] {
        for (int s = 0; s < kNumSplits; ++s) {
          const auto& rows = split.segment_indices[s];
          // train always evaluates; a val/test split that degenerated to a
          // single class is skipped rather than failing the run
          if (static_cast<SplitSet>(s) != SplitSet::Train) {
            std::vector<int> distinct;
            for (std::size_t r : rows) {
              const int l = task_label_index(task, data.infos[r].label);
              if (std::find(distinct.begin(), distinct.end(), l) ==
                  distinct.end())
                distinct.push_back(l);
            }
            if (distinct.size() < 2) continue;
          }
          AucReport report = macro_ovr_auc(
              probs[s], gather_labels(data.infos, rows, task), class_names);
          report.task = task;
          report.model = model_tag(cfg, entry);
          report.features = feature_tag(entry);
          report.split = split_name(static_cast<SplitSet>(s));
          record.reports.push_back(report);

          if (static_cast<SplitSet>(s) == SplitSet::Test) {
            const std::vector<int> y =
                gather_labels(data.infos, rows, task);
            for (std::size_t c = 0; c < class_names.size(); ++c) {
              if (!report.present[c]) continue;
              std::vector<double> scores(rows.size());
              std::vector<int> ovr(rows.size());
              bool both = false;
              for (std::size_t r = 0; r < rows.size(); ++r) {
                scores[r] = probs[s](r, c);
                ovr[r] = y[r] == static_cast<int>(c) ? 1 : 0;
              }
              for (std::size_t r = 1; r < ovr.size(); ++r)
                if (ovr[r] != ovr[0]) both = true;
              if (!both) continue;
              LabeledRocCurve lc;
              lc.task = task;
              lc.model = report.model;
              lc.features = report.features;
              lc.split = report.split;
              lc.class_name = class_names[c];
              lc.curve = roc_curve(scores, ovr);
              record.roc_curves.push_back(std::move(lc));
            }
          }
        }
      });
    }
  }

  emit_report({record}, cfg.out_dir);
  return record;
}

void emit_report(const std::vector<RunRecord>& records,
                 const std::string& out_dir) {
  if (records.empty()) throw DataError("no run records to report");
  const fs::path reports = fs::path(out_dir) / "reports";
  fs::create_directories(reports);

  std::vector<AucReport> all;
  std::vector<LabeledRocCurve> curves;
  for (const RunRecord& rec : records) {
    all.insert(all.end(), rec.reports.begin(), rec.reports.end());
    curves.insert(curves.end(), rec.roc_curves.begin(), rec.roc_curves.end());
  }

  auto split_rank = [](const std::string& s) {
    return s == "train" ? 0 : s == "val" ? 1 : 2;
  };
  std::stable_sort(all.begin(), all.end(),
                   [&](const AucReport& a, const AucReport& b) {
                     return std::tie(a.task, a.model, a.features) <
                                std::tie(b.task, b.model, b.features) ||
                            (std::tie(a.task, a.model, a.features) ==
                                 std::tie(b.task, b.model, b.features) &&
                             split_rank(a.split) < split_rank(b.split));
                   });

  for (const AucReport& r : all) {
    std::string name = "report_" + r.task + "_" + r.model + "_" + r.features +
                       "_" + r.split + ".json";
    for (char& c : name)
      if (c == '[' || c == ']' || c == '-') c = '_';
    write_text_file((reports / name).string(), auc_report_to_json(r) + "\n");
  }

  for (const char* task : {"binary", "five-class"}) {
    std::vector<AucReport> task_reports;
    for (const AucReport& r : all)
      if (r.task == task) task_reports.push_back(r);
    if (task_reports.empty()) continue;
    std::string name(task);
    std::replace(name.begin(), name.end(), '-', '_');
    write_table_csv((reports / ("auc_table_" + name + ".csv")).string(),
                    task_reports);
  }

  if (!curves.empty())
    write_roc_csv((reports / "roc_points.csv").string(), curves);

  // run metadata: config echo, seeds, stage timings, artifact paths
  json runs = json::array();
  for (const RunRecord& rec : records) {
    json r;
    r["seed"] = rec.seed;
    r["config"] = json::parse(rec.config_json);
    json timings = json::array();
    for (const StageTiming& t : rec.timings)
      timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    r["timings"] = std::move(timings);
    r["artifacts"] = rec.artifacts;
    json rep = json::array();
    for (const AucReport& a : rec.reports)
      rep.push_back(json::parse(auc_report_to_json(a)));
    r["reports"] = std::move(rep);
    runs.push_back(std::move(r));
  }
  json doc;
  doc["runs"] = std::move(runs);
  write_text_file((fs::path(out_dir) / "run_record.json").string(),
                  doc.dump(2) + "\n");
}

}  // namespace bsb
