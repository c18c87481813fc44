#include "bsbench/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bsbench/wav.hpp"

namespace bsb {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Annotation> read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);
  // tolerate a UTF-8 BOM and trailing CR
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "start_s,end_s,label")
    throw ParseError("bad header (want start_s,end_s,label): " + path);

  std::vector<Annotation> events;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string start_str, end_str, label_str;
    if (!std::getline(ss, start_str, ',') || !std::getline(ss, end_str, ',') ||
        !std::getline(ss, label_str))
      throw ParseError(path + ":" + std::to_string(row) +
                       ": expected start_s,end_s,label");
    Annotation ev;
    std::size_t used = 0;
    try {
      ev.start_s = std::stod(start_str, &used);
      if (used != start_str.size()) throw std::invalid_argument(start_str);
      ev.end_s = std::stod(end_str, &used);
      if (used != end_str.size()) throw std::invalid_argument(end_str);
      ev.label = parse_label(label_str);
    } catch (const UnknownLabelError& e) {
      throw ParseError(path + ":" + std::to_string(row) + ": " + e.what());
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(row) + ": bad number");
    }
    if (ev.label == PatternLabel::NonBS)
      throw ParseError(path + ":" + std::to_string(row) +
                       ": NonBS rows are not stored; unannotated time is NonBS");
    if (!(ev.end_s > ev.start_s) || ev.start_s < 0.0)
      throw ParseError(path + ":" + std::to_string(row) +
                       ": need 0 <= start_s < end_s");
    events.push_back(ev);
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const Annotation& a, const Annotation& b) {
                     return a.start_s < b.start_s;
                   });
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].start_s < events[i - 1].end_s)
      throw OverlapError(path + ": events overlap near t=" +
                         std::to_string(events[i].start_s) + "s");
  return events;
}

void write_annotations(const std::string& path,
                       const std::vector<Annotation>& events) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << "start_s,end_s,label\n";
  char buf[96];
  for (const Annotation& ev : events) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%s", ev.start_s, ev.end_s,
                  render_label(ev.label).c_str());
    out << buf << "\n";
  }
  if (!out) throw IoFailure("write failed: " + path);
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ManifestError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array())
    throw ManifestError(path + ": expected {\"entries\": [...]}");

  DatasetManifest m;
  for (const auto& item : doc["entries"]) {
    ManifestEntry e;
    try {
      e.wav_path = item.at("wav_path").get<std::string>();
      e.annotation_path = item.at("annotation_path").get<std::string>();
      e.subject_id = item.at("subject_id").get<std::string>();
    } catch (const json::exception& ex) {
      throw ManifestError(path + ": bad entry: " + ex.what());
    }
    if (e.wav_path.empty() || e.annotation_path.empty() ||
        e.subject_id.empty())
      throw ManifestError(path + ": entry fields must be non-empty");
    m.entries.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  json doc;
  doc["entries"] = json::array();
  for (const ManifestEntry& e : manifest.entries)
    doc["entries"].push_back({{"wav_path", e.wav_path},
                              {"annotation_path", e.annotation_path},
                              {"subject_id", e.subject_id}});
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoFailure("write failed: " + path);
}

std::vector<AnnotatedRecording> load_manifest(const std::string& path,
                                              DatasetManifest* manifest_out) {
  const DatasetManifest manifest = read_manifest(path);
  const fs::path base = fs::path(path).parent_path();

  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<AnnotatedRecording> recordings;
  std::string failures;
  int n_failures = 0;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& e = manifest.entries[i];
    try {
      AnnotatedRecording rec;
      rec.subject_id = e.subject_id;
      rec.waveform = read_wav(resolve(e.wav_path));
      rec.events = read_annotations(resolve(e.annotation_path));
      const auto violations = validate_recording(rec);
      if (!violations.empty())
        throw DataError("invalid recording: " + violations.front().message);
      recordings.push_back(std::move(rec));
    } catch (const std::exception& ex) {
      ++n_failures;
      failures += "\n  entry " + std::to_string(i) + " (subject " +
                  e.subject_id + "): " + ex.what();
    }
  }
  if (n_failures > 0)
    throw ManifestError(path + ": " + std::to_string(n_failures) +
                        " entr" + (n_failures == 1 ? "y" : "ies") +
                        " failed to load:" + failures);
  if (manifest_out) *manifest_out = manifest;
  return recordings;
}

}  // namespace bsb
