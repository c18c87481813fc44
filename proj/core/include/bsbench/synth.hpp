#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bsbench/rng.hpp"
#include "bsbench/types.hpp"

namespace bsb {

struct InvalidPatternError : DataError {
  using DataError::DataError;
};
struct PlacementFailureError : DataError {
  using DataError::DataError;
};

// Per-pattern acoustic parameters. Defaults reproduce the documented
// pattern families: SB damped click near 400 Hz, MB burst trains, CRS
// band-limited rumble in 500-1700 Hz, HS low-fundamental harmonic stacks.
struct PatternParams {
  // SB: exponentially decaying sinusoid
  double sb_duration_ms[2] = {10.0, 30.0};
  double sb_carrier_center_hz = 400.0;
  double sb_carrier_spread_hz = 50.0;
  // envelope falls to this fraction of peak at event end
  double sb_decay_end_fraction = 0.05;

  // MB: 2-5 SB components with irregular silent gaps; total clamped by
  // rescaling the gaps
  int mb_components[2] = {2, 5};
  double mb_gap_ms[2] = {20.0, 400.0};
  double mb_duration_ms[2] = {40.0, 1500.0};

  // CRS: amplitude-modulated band noise
  double crs_passband_hz[2] = {500.0, 1700.0};
  double crs_duration_ms[2] = {200.0, 4000.0};
  double crs_envelope_roughness = 0.7;  // knot depth in [0, 1)
  double crs_envelope_knot_ms = 20.0;

  // HS: harmonic stack over a low fundamental, amplitude 1/k per harmonic k
  double hs_fundamental_hz[2] = {150.0, 260.0};
  int hs_harmonics[2] = {3, 4};
  double hs_duration_ms[2] = {50.0, 1500.0};

  void validate(int sample_rate_hz) const;
};

struct CorpusConfig {
  int n_subjects = 16;
  double recording_len_s = 60.0;
  double events_per_minute = 20.0;
  // probabilities over {SB, MB, CRS, HS}; the default is the observed
  // event-level class distribution
  std::array<double, 4> class_mixture = {0.5853, 0.2178, 0.1724, 0.0245};
  double noise_floor_snr_db = 15.0;
  int sample_rate_hz = 44100;
  std::uint64_t seed = 42;
  PatternParams patterns;

  void validate() const;
};

// mixture index -> label
inline constexpr std::array<PatternLabel, 4> kMixtureLabels = {
    PatternLabel::SB, PatternLabel::MB, PatternLabel::CRS, PatternLabel::HS};

// All random structure of one event, drawn up front so that timelines can be
// planned without rendering audio.
struct EventShape {
  PatternLabel label = PatternLabel::SB;
  double duration_s = 0.0;
  double sb_carrier_hz = 0.0;
  std::vector<double> mb_component_dur_s;
  std::vector<double> mb_component_hz;
  std::vector<double> mb_gap_s;
  std::vector<double> crs_env_knots;
  std::uint64_t crs_noise_seed = 0;
  double hs_f0_hz = 0.0;
  int hs_n_harmonics = 0;
};

EventShape draw_event_shape(PatternLabel pattern, const PatternParams& params,
                            Rng& rng);

// Renders a drawn shape; peak amplitude normalized to 0.9.
Waveform render_event(const EventShape& shape, const PatternParams& params,
                      int sample_rate_hz);

// draw + render in one step
Waveform synth_event(PatternLabel pattern, const PatternParams& params,
                     int sample_rate_hz, Rng& rng);

// Event placement plan for one recording: Poisson arrivals, mixture-drawn
// patterns, overlap-free placement by rejection with a bounded retry budget.
struct TimelinePlan {
  std::vector<Annotation> events;  // sorted by start_s
  std::vector<EventShape> shapes;  // aligned with events
};

TimelinePlan plan_recording(const CorpusConfig& cfg, Rng& rng);

AnnotatedRecording synth_recording(const CorpusConfig& cfg,
                                   const std::string& subject_id, Rng& rng);

// n_subjects recordings with distinct subject ids; fully determined by
// cfg.seed (per-subject sub-seeds are derived from it, so generation order
// does not matter).
std::vector<AnnotatedRecording> synth_corpus(const CorpusConfig& cfg);

std::string corpus_subject_id(int index);
Rng corpus_subject_rng(const CorpusConfig& cfg, int index);

// Annotation timelines only, identical to the ones synth_corpus would
// produce; used where audio is not needed.
std::vector<std::pair<std::string, TimelinePlan>> synth_corpus_timelines(
    const CorpusConfig& cfg);

}  // namespace bsb
