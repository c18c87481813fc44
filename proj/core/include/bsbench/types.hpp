#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bsb {

// ---------------------------------------------------------------------------
// Error hierarchy. The CLI maps these categories to exit codes
// (config -> 2, data -> 3, training -> 4).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct TrainError : Error {
  using Error::Error;
};

struct UnknownLabelError : DataError {
  using DataError::DataError;
};
struct TooShortError : DataError {
  using DataError::DataError;
};
struct ShapeMismatchError : DataError {
  using DataError::DataError;
};

// ---------------------------------------------------------------------------
// Pattern vocabulary
// ---------------------------------------------------------------------------

// Enum order is the total order used everywhere: iteration, report columns,
// probability column layout.
enum class PatternLabel : int { NonBS = 0, SB = 1, MB = 2, CRS = 3, HS = 4 };

inline constexpr int kNumLabels = 5;

inline constexpr std::array<PatternLabel, kNumLabels> kAllLabels = {
    PatternLabel::NonBS, PatternLabel::SB, PatternLabel::MB, PatternLabel::CRS,
    PatternLabel::HS};

// Accepts {"none","non-bs","sb","mb","crs","hs"} case-insensitively.
// Throws UnknownLabelError otherwise.
PatternLabel parse_label(std::string_view text);

// "None", "SB", "MB", "CRS", "HS". parse_label(render_label(x)) == x.
std::string render_label(PatternLabel label);

// ---------------------------------------------------------------------------
// Audio domain types
// ---------------------------------------------------------------------------

// Mono sample sequence. Samples live in [-1, 1]; sample_rate_hz >= 8000.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 44100;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// A labeled event on a recording timeline. Unannotated time is implicitly
// NonBS, so label is never NonBS here.
struct Annotation {
  double start_s = 0.0;
  double end_s = 0.0;
  PatternLabel label = PatternLabel::SB;
};

// A subject's waveform plus its time-stamped events, sorted by start_s and
// pairwise non-overlapping.
struct AnnotatedRecording {
  std::string subject_id;
  Waveform waveform;
  std::vector<Annotation> events;
};

// Fixed-length labeled window cut from a recording.
struct Segment {
  Waveform samples;
  PatternLabel label = PatternLabel::NonBS;
  std::string subject_id;
  double origin_s = 0.0;
};

// Label/subject view of a segment; enough for splitting and counting without
// carrying audio around.
struct SegmentInfo {
  PatternLabel label = PatternLabel::NonBS;
  std::string subject_id;
  double origin_s = 0.0;
};

inline SegmentInfo to_info(const Segment& s) {
  return SegmentInfo{s.label, s.subject_id, s.origin_s};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// One broken invariant. event_index is -1 for waveform-level problems.
struct Violation {
  int event_index = -1;
  std::string message;
};

// Empty result iff every AnnotatedRecording invariant holds. Deterministic
// and order-stable; violations are data, not errors.
std::vector<Violation> validate_recording(const AnnotatedRecording& rec);

}  // namespace bsb
