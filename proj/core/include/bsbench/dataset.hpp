#pragma once

#include <string>
#include <vector>

#include "bsbench/types.hpp"

namespace bsb {

struct ParseError : DataError {
  using DataError::DataError;
};
struct OverlapError : DataError {
  using DataError::DataError;
};
struct ManifestError : DataError {
  using DataError::DataError;
};

// CSV with header `start_s,end_s,label`, one event per row. Rows are
// returned sorted by start_s and validated non-overlapping.
std::vector<Annotation> read_annotations(const std::string& path);

// Times serialized with 6 decimals.
void write_annotations(const std::string& path,
                       const std::vector<Annotation>& events);

struct ManifestEntry {
  std::string wav_path;
  std::string annotation_path;
  std::string subject_id;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

// `{"entries":[{"wav_path":...,"annotation_path":...,"subject_id":...}]}`
DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& manifest);

// Loads and validates every referenced file. Relative paths resolve against
// the manifest's directory. Per-entry failures are aggregated into one
// ManifestError naming each bad entry; nothing is fail-fast.
std::vector<AnnotatedRecording> load_manifest(const std::string& path,
                                              DatasetManifest* manifest_out = nullptr);

}  // namespace bsb
