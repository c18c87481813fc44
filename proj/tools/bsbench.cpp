// bsbench: synthetic bowel-sound benchmark runner.
//
// Subcommands map onto the pipeline stages (synth, segment, split, features,
// train, eval), plus `bench` for the whole run and `report` to rebuild the
// summary tables from persisted report JSONs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsbench/dataset.hpp"
#include "bsbench/pipeline.hpp"
#include "bsbench/wav.hpp"

namespace fs = std::filesystem;
using namespace bsb;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
};

BenchConfig effective_config(const GlobalOpts& g) {
  BenchConfig cfg;
  if (!g.config_path.empty()) {
    cfg = bench_config_from_json_file(g.config_path);
  } else {
    cfg = bench_config_from_json_text("{}");
  }
  if (g.seed_set) {
    // rebuilding from JSON re-derives every stage seed from the master
    nlohmann::json doc = nlohmann::json::parse(bench_config_to_json(cfg));
    doc["seed"] = g.seed;
    cfg = bench_config_from_json_text(doc.dump());
  }
  if (g.out_set || cfg.out_dir.empty()) cfg.out_dir = g.out_dir;
  return cfg;
}

void write_provenance(const BenchConfig& cfg, const std::string& cmd) {
  const fs::path dir = fs::path(cfg.out_dir) / "provenance";
  fs::create_directories(dir);
  write_text_file((dir / (cmd + "_config.json")).string(),
                  bench_config_to_json(cfg) + "\n");
}

int cmd_synth(const BenchConfig& cfg) {
  write_provenance(cfg, "synth");
  const fs::path corpus_dir = fs::path(cfg.out_dir) / "corpus";
  fs::create_directories(corpus_dir);

  DatasetManifest manifest;
  for (int i = 0; i < cfg.corpus.n_subjects; ++i) {
    Rng rng = corpus_subject_rng(cfg.corpus, i);
    const AnnotatedRecording rec =
        synth_recording(cfg.corpus, corpus_subject_id(i), rng);
    const std::string wav_name = rec.subject_id + ".wav";
    const std::string csv_name = rec.subject_id + ".csv";
    write_wav((corpus_dir / wav_name).string(), rec.waveform);
    write_annotations((corpus_dir / csv_name).string(), rec.events);
    manifest.entries.push_back({wav_name, csv_name, rec.subject_id});
  }
  const std::string manifest_path = (corpus_dir / "manifest.json").string();
  write_manifest(manifest_path, manifest);
  std::printf("wrote %d recordings to %s\n", cfg.corpus.n_subjects,
              corpus_dir.string().c_str());
  return 0;
}

int cmd_segment(const BenchConfig& cfg, const std::string& manifest_path) {
  write_provenance(cfg, "segment");
  DatasetManifest manifest;
  const std::vector<AnnotatedRecording> recordings =
      load_manifest(manifest_path, &manifest);

  std::vector<SegmentRecord> out;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    const AnnotatedRecording& rec = recordings[i];
    const std::vector<SegmentInfo> infos = segment_timeline(
        rec.events, rec.waveform.duration_s(), rec.waveform.sample_rate_hz,
        rec.subject_id, cfg.window);
    for (const SegmentInfo& info : infos)
      out.push_back({manifest.entries[i].wav_path, info.subject_id,
                     info.origin_s, info.label});
  }
  fs::create_directories(cfg.out_dir);
  const std::string path =
      (fs::path(cfg.out_dir) / "segments.csv").string();
  write_segments_csv(path, out);
  std::printf("wrote %zu segments to %s\n", out.size(), path.c_str());
  return 0;
}

std::vector<SegmentInfo> to_infos(const std::vector<SegmentRecord>& records) {
  std::vector<SegmentInfo> infos;
  infos.reserve(records.size());
  for (const SegmentRecord& r : records)
    infos.push_back({r.label, r.subject_id, r.origin_s});
  return infos;
}

int cmd_split(const BenchConfig& cfg, const std::string& segments_path) {
  write_provenance(cfg, "split");
  const std::vector<SegmentRecord> records = read_segments_csv(segments_path);
  const SplitAssignment split = stratified_group_split(
      to_infos(records), cfg.split_ratio, derive_seed(cfg.seed, 101));
  fs::create_directories(cfg.out_dir);
  const std::string path = (fs::path(cfg.out_dir) / "splits.json").string();
  write_split_json(path, split);
  std::printf("wrote %s (%zu subjects)\n", path.c_str(),
              split.subjects.size());
  return 0;
}

int cmd_features(const BenchConfig& cfg, const std::string& manifest_path,
                 const std::string& segments_path, const std::string& kind) {
  write_provenance(cfg, "features");
  const std::vector<SegmentRecord> records = read_segments_csv(segments_path);
  const fs::path base = fs::path(manifest_path).parent_path();

  FeatureMatrix fm;
  std::vector<double> staging;
  std::size_t n_cols = 0;

  std::string current_wav;
  Waveform wf;
  for (const SegmentRecord& rec : records) {
    if (rec.wav_path != current_wav) {
      fs::path p(rec.wav_path);
      wf = read_wav(p.is_absolute() ? p.string() : (base / p).string());
      current_wav = rec.wav_path;
    }
    Segment seg;
    seg.label = rec.label;
    seg.subject_id = rec.subject_id;
    seg.origin_s = rec.origin_s;
    seg.samples.sample_rate_hz = wf.sample_rate_hz;
    const std::size_t start = static_cast<std::size_t>(
        std::llround(rec.origin_s * wf.sample_rate_hz));
    const std::size_t window_n = static_cast<std::size_t>(
        std::llround(cfg.window.window_s * wf.sample_rate_hz));
    if (start + window_n > wf.samples.size())
      throw DataError("segment at " + std::to_string(rec.origin_s) +
                      "s runs past the end of " + rec.wav_path);
    seg.samples.samples.assign(wf.samples.begin() + start,
                               wf.samples.begin() + start + window_n);

    std::vector<double> row;
    if (kind == "tabular")
      row = extract_features(seg, cfg.dsp);
    else if (kind == "mfcc-stats")
      row = extract_mfcc_stats(seg, cfg.dsp);
    else if (kind == "mfcc-flat")
      row = extract_mfcc_flat(seg, cfg.dsp);
    else
      throw ConfigError("unknown feature kind: " + kind);
    if (n_cols == 0) n_cols = row.size();
    staging.insert(staging.end(), row.begin(), row.end());
    fm.labels.push_back(rec.label);
    fm.subject_ids.push_back(rec.subject_id);
  }
  if (fm.labels.empty()) throw DataError("no segments in " + segments_path);

  fm.values = Matrix(fm.labels.size(), n_cols);
  std::copy(staging.begin(), staging.end(), fm.values.data().begin());
  if (kind == "tabular")
    fm.spec = tabular_feature_spec();
  else if (kind == "mfcc-stats")
    fm.spec = mfcc_stats_spec(cfg.dsp);
  else
    fm.spec = mfcc_flat_spec(
        cfg.dsp, n_cols / static_cast<std::size_t>(cfg.dsp.n_mfcc));

  fs::create_directories(fs::path(cfg.out_dir) / "features");
  std::string name(kind);
  std::replace(name.begin(), name.end(), '-', '_');
  const std::string path =
      (fs::path(cfg.out_dir) / "features" / (name + ".csv")).string();
  write_feature_csv(path, fm);
  std::printf("wrote %zu x %zu feature matrix to %s\n", fm.values.rows(),
              fm.values.cols(), path.c_str());
  return 0;
}

int cmd_train(const BenchConfig& cfg, const std::string& features_path,
              const std::string& splits_path, const std::string& model_kind,
              const std::string& task) {
  write_provenance(cfg, "train");
  const FeatureMatrix fm = read_feature_csv(features_path);

  std::vector<SegmentInfo> infos;
  for (std::size_t i = 0; i < fm.labels.size(); ++i)
    infos.push_back({fm.labels[i], fm.subject_ids[i], 0.0});
  const SplitAssignment split = read_split_json(splits_path, infos);

  const std::vector<std::string> class_names = task_class_names(task);
  auto gather = [&](SplitSet s, Matrix& X, std::vector<int>& y) {
    const auto& rows = split.segment_indices[static_cast<int>(s)];
    X = Matrix(rows.size(), fm.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::copy(fm.values.row(rows[i]), fm.values.row(rows[i]) + fm.values.cols(),
                X.row(i));
      y.push_back(task_label_index(task, fm.labels[rows[i]]));
    }
  };
  Matrix x_train, x_val;
  std::vector<int> y_train, y_val;
  gather(SplitSet::Train, x_train, y_train);
  gather(SplitSet::Val, x_val, y_val);

  std::string model_json;
  if (model_kind == "gbdt") {
    model_json = gbdt_to_json(
        train_gbdt(x_train, y_train, class_names, gbdt_profile_config(cfg)));
  } else if (model_kind == "mlp") {
    TrainReport report;
    model_json = mlp_to_json(train_mlp(x_train, y_train, class_names, cfg.mlp,
                                       &report, &x_val, &y_val));
  } else {
    throw ConfigError("model must be gbdt or mlp");
  }

  fs::create_directories(fs::path(cfg.out_dir) / "models");
  std::string name = model_kind + "_" + task + ".json";
  std::replace(name.begin(), name.end(), '-', '_');
  const std::string path =
      (fs::path(cfg.out_dir) / "models" / name).string();
  write_text_file(path, model_json + "\n");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_eval(const BenchConfig& cfg, const std::string& features_path,
             const std::string& splits_path, const std::string& model_path,
             const std::string& split_tag) {
  write_provenance(cfg, "eval");
  const FeatureMatrix fm = read_feature_csv(features_path);
  std::vector<SegmentInfo> infos;
  for (std::size_t i = 0; i < fm.labels.size(); ++i)
    infos.push_back({fm.labels[i], fm.subject_ids[i], 0.0});
  const SplitAssignment split = read_split_json(splits_path, infos);

  std::ifstream in(model_path);
  if (!in) throw DataError("cannot open model: " + model_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string model_json = ss.str();

  std::vector<std::string> class_names;
  std::string model_tag;
  Matrix probs;
  const auto& rows = split.segment_indices[static_cast<int>(parse_split(split_tag))];
  Matrix X(rows.size(), fm.values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(fm.values.row(rows[i]), fm.values.row(rows[i]) + fm.values.cols(),
              X.row(i));

  if (model_json.find("bsbench.gbdt") != std::string::npos) {
    const GbdtModel model = gbdt_from_json(model_json);
    class_names = model.class_names;
    model_tag = "gbdt";
    probs = predict_gbdt(model, X);
  } else {
    const MlpModel model = mlp_from_json(model_json);
    class_names = model.class_names;
    model_tag = "mlp";
    probs = predict_mlp(model, X);
  }
  const std::string task = class_names.size() == 2 ? "binary" : "five-class";

  std::vector<int> y;
  for (std::size_t r : rows)
    y.push_back(task_label_index(task, fm.labels[r]));

  AucReport report = macro_ovr_auc(probs, y, class_names);
  report.task = task;
  report.model = model_tag;
  report.features = fm.spec.version;
  report.split = split_tag;

  fs::create_directories(fs::path(cfg.out_dir) / "reports");
  std::string name = "report_" + task + "_" + model_tag + "_" + split_tag + ".json";
  std::replace(name.begin(), name.end(), '-', '_');
  const std::string path =
      (fs::path(cfg.out_dir) / "reports" / name).string();
  write_text_file(path, auc_report_to_json(report) + "\n");
  std::printf("%s %s %s macro AUC %.4f -> %s\n", task.c_str(),
              model_tag.c_str(), split_tag.c_str(), report.macro, path.c_str());
  return 0;
}

int cmd_bench(const BenchConfig& cfg) {
  const RunRecord record = run_benchmark(cfg);
  for (const AucReport& r : record.reports)
    std::printf("%-10s %-14s %-10s %-5s macro AUC %.4f\n", r.task.c_str(),
                r.model.c_str(), r.features.c_str(), r.split.c_str(), r.macro);
  std::printf("artifacts under %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_report(const BenchConfig& cfg, const std::string& reports_dir) {
  write_provenance(cfg, "report");
  std::set<std::string> files;
  for (const auto& entry : fs::directory_iterator(reports_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".json")
      files.insert(entry.path().string());
  }
  if (files.empty()) throw DataError("no report_*.json under " + reports_dir);

  RunRecord record;
  record.config_json = "{}";
  for (const std::string& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    record.reports.push_back(auc_report_from_json(ss.str()));
  }
  emit_report({record}, cfg.out_dir);
  std::printf("rebuilt tables under %s/reports from %zu report files\n",
              cfg.out_dir.c_str(), files.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic bowel-sound classification benchmark"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--config", global.config_path, "benchmark config JSON");
  app.add_option("--seed", global.seed, "master seed (overrides config)")
      ->each([&](const std::string&) { global.seed_set = true; });
  app.add_option("--out", global.out_dir, "output directory")
      ->each([&](const std::string&) { global.out_set = true; });

  auto* synth = app.add_subcommand("synth", "generate a corpus on disk");

  auto* segment = app.add_subcommand("segment", "window a corpus into segments");
  std::string manifest_path;
  segment->add_option("--manifest", manifest_path, "corpus manifest JSON")
      ->required();

  auto* split = app.add_subcommand("split", "stratified subject-level split");
  std::string segments_path;
  split->add_option("--segments", segments_path, "segments.csv")->required();

  auto* features = app.add_subcommand("features", "extract segment features");
  std::string feat_manifest, feat_segments, feat_kind = "tabular";
  features->add_option("--manifest", feat_manifest, "corpus manifest JSON")
      ->required();
  features->add_option("--segments", feat_segments, "segments.csv")->required();
  features->add_option("--kind", feat_kind,
                       "tabular | mfcc-stats | mfcc-flat");

  auto* train = app.add_subcommand("train", "fit a classifier");
  std::string train_features, train_splits, train_model = "gbdt",
              train_task = "five-class";
  train->add_option("--features", train_features, "feature CSV")->required();
  train->add_option("--splits", train_splits, "splits.json")->required();
  train->add_option("--model", train_model, "gbdt | mlp");
  train->add_option("--task", train_task, "binary | five-class");

  auto* eval = app.add_subcommand("eval", "evaluate a trained model");
  std::string eval_features, eval_splits, eval_model, eval_split = "test";
  eval->add_option("--features", eval_features, "feature CSV")->required();
  eval->add_option("--splits", eval_splits, "splits.json")->required();
  eval->add_option("--model-file", eval_model, "model JSON")->required();
  eval->add_option("--split", eval_split, "train | val | test");

  auto* bench = app.add_subcommand("bench", "end-to-end benchmark run");

  auto* report = app.add_subcommand("report", "rebuild tables from reports");
  std::string reports_dir;
  report->add_option("--reports-dir", reports_dir,
                     "directory of report_*.json files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const BenchConfig cfg = effective_config(global);
    if (synth->parsed()) return cmd_synth(cfg);
    if (segment->parsed()) return cmd_segment(cfg, manifest_path);
    if (split->parsed()) return cmd_split(cfg, segments_path);
    if (features->parsed())
      return cmd_features(cfg, feat_manifest, feat_segments, feat_kind);
    if (train->parsed())
      return cmd_train(cfg, train_features, train_splits, train_model,
                       train_task);
    if (eval->parsed())
      return cmd_eval(cfg, eval_features, eval_splits, eval_model, eval_split);
    if (bench->parsed()) return cmd_bench(cfg);
    if (report->parsed())
      return cmd_report(cfg, reports_dir.empty()
                                 ? (fs::path(cfg.out_dir) / "reports").string()
                                 : reports_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const TrainError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 4;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
