#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bsbench/dsp.hpp"
#include "bsbench/features.hpp"
#include "bsbench/gbdt.hpp"
#include "bsbench/metrics.hpp"
#include "bsbench/mlp.hpp"
#include "bsbench/split.hpp"
#include "bsbench/synth.hpp"
#include "bsbench/windowing.hpp"

namespace bsb {

// Model roster entries: "gbdt-tabular", "gbdt-mfcc-stats", "mlp-tabular",
// "mlp-mfcc". Tasks: "binary", "five-class".
struct BenchConfig {
  CorpusConfig corpus;
  std::string manifest_path;  // non-empty: load external data instead
  bool persist_corpus = false;
  WindowConfig window;
  SplitRatio split_ratio;
  DspConfig dsp;
  GbdtConfig gbdt;
  std::string gbdt_profile = "paper";  // "paper" | "tuned"
  MlpConfig mlp;
  std::vector<std::string> models = {"gbdt-tabular"};
  std::vector<std::string> tasks = {"binary", "five-class"};
  std::string out_dir = "out";
  std::uint64_t seed = 42;  // master; stage seeds derive from it

  void validate() const;
};

BenchConfig bench_config_from_json_text(const std::string& text);
BenchConfig bench_config_from_json_file(const std::string& path);
std::string bench_config_to_json(const BenchConfig& cfg);

// applies the profile on top of cfg.gbdt ("tuned": lr 0.3, 200 rounds)
GbdtConfig gbdt_profile_config(const BenchConfig& cfg);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunRecord {
  std::string config_json;
  std::uint64_t seed = 0;
  std::vector<StageTiming> timings;
  std::map<std::string, std::string> artifacts;
  std::vector<AucReport> reports;
  std::vector<LabeledRocCurve> roc_curves;
};

// Runs generation/loading -> segmentation -> split -> features -> training
// -> evaluation, writing artifacts under cfg.out_dir
// (corpus/, splits.json, features/, models/, reports/, provenance/).
RunRecord run_benchmark(const BenchConfig& cfg);

// Table CSVs (one per task), ROC plot CSV and per-run JSONs; re-emission
// from the same records is byte-identical.
void emit_report(const std::vector<RunRecord>& records,
                 const std::string& out_dir);

// ---- staged-subcommand helpers -----------------------------------------

struct SegmentRecord {
  std::string wav_path;
  std::string subject_id;
  double origin_s = 0.0;
  PatternLabel label = PatternLabel::NonBS;
};

// CSV with header wav_path,subject_id,origin_s,label.
void write_segments_csv(const std::string& path,
                        const std::vector<SegmentRecord>& segments);
std::vector<SegmentRecord> read_segments_csv(const std::string& path);

// Feature-kind helpers shared by `bench` and the staged subcommands.
bool model_uses_kind(const std::string& model, const std::string& kind);
std::vector<std::string> kinds_for_models(const std::vector<std::string>& models);

// Binary task collapse: NonBS -> 0 ("None"), anything else -> 1 ("BS").
int binary_label(PatternLabel label);
std::vector<std::string> task_class_names(const std::string& task);
int task_label_index(const std::string& task, PatternLabel label);

// Writes `text` if it differs from the current file content.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bsb
