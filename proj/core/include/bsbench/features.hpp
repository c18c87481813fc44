#pragma once

#include <string>
#include <vector>

#include "bsbench/dsp.hpp"
#include "bsbench/matrix.hpp"
#include "bsbench/types.hpp"

namespace bsb {

// Ordered feature-column contract. Order is stable across runs and is the
// CSV column order.
struct FeatureSpec {
  std::vector<std::string> names;
  std::string version;
};

// Rows aligned with labels and subject ids.
struct FeatureMatrix {
  Matrix values;
  std::vector<PatternLabel> labels;
  std::vector<std::string> subject_ids;
  FeatureSpec spec;
};

// The 66-column tabular set: 9 frame-level descriptors {rms, log_energy,
// zcr, centroid, rolloff85, flux, flatness, dominant_hz, acf_lag_ms}
// summarized by {mean, std, min, max, p20, p50, p80}, plus 3 segment-level
// features {active_fraction, burst_count, active_duration_s}.
FeatureSpec tabular_feature_spec();

// Frame grid follows cfg (n_fft / hop). Silent frames produce defined
// values: zcr 0, centroid 0, rolloff 0, flatness 0, dominant 0, lag 0.
std::vector<double> extract_features(const Segment& seg, const DspConfig& cfg);

FeatureMatrix extract_matrix(const std::vector<Segment>& segments,
                             const DspConfig& cfg);

// MFCC summary stats (mean + std per coefficient) as a tabular matrix.
FeatureSpec mfcc_stats_spec(const DspConfig& cfg);
std::vector<double> extract_mfcc_stats(const Segment& seg, const DspConfig& cfg);

// Flattened MFCC (frame-major) for the neural path; column count depends on
// segment length and cfg.
FeatureSpec mfcc_flat_spec(const DspConfig& cfg, std::size_t n_frames);
std::vector<double> extract_mfcc_flat(const Segment& seg, const DspConfig& cfg);

// CSV with the spec names as header plus trailing `label`,`subject_id`.
void write_feature_csv(const std::string& path, const FeatureMatrix& fm);
FeatureMatrix read_feature_csv(const std::string& path);

}  // namespace bsb
