#include "bsbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace bsb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPeakAmplitude = 0.9;
// nominal power of a peak-0.9 sinusoid; SNR reference when a recording has
// no events
constexpr double kNominalEventPower = kPeakAmplitude * kPeakAmplitude / 2.0;
constexpr int kPlacementRetries = 1000;

void check_range(const double (&r)[2], const char* what) {
  if (!(r[0] > 0.0) || !(r[1] > r[0]))
    throw ConfigError(std::string(what) + " range must be positive and non-degenerate");
}

// RBJ constant-peak-gain bandpass biquad
struct Biquad {
  double b0, b1, b2, a1, a2;
};

Biquad bandpass_biquad(double f0_hz, double q, int sample_rate_hz) {
  const double w0 = 2.0 * kPi * f0_hz / sample_rate_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s{};
  s.b0 = alpha / a0;
  s.b1 = 0.0;
  s.b2 = -alpha / a0;
  s.a1 = -2.0 * std::cos(w0) / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

void filter_forward(const Biquad& s, std::vector<double>& x) {
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (double& v : x) {
    const double y = s.b0 * v + s.b1 * x1 + s.b2 * x2 - s.a1 * y1 - s.a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

// two cascaded sections, each run forward then backward: 4th-order
// magnitude, zero phase
void bandpass_filtfilt(std::vector<double>& x, double f_lo, double f_hi,
                       int sample_rate_hz) {
  const double f0 = std::sqrt(f_lo * f_hi);
  const double q = f0 / (f_hi - f_lo);
  const Biquad s = bandpass_biquad(f0, q, sample_rate_hz);
  for (int pass = 0; pass < 2; ++pass) {
    filter_forward(s, x);
    std::reverse(x.begin(), x.end());
    filter_forward(s, x);
    std::reverse(x.begin(), x.end());
  }
}

std::size_t duration_samples(double duration_s, int sample_rate_hz) {
  const auto n = static_cast<std::size_t>(
      std::llround(duration_s * sample_rate_hz));
  return std::max<std::size_t>(n, 1);
}

void normalize_peak(std::vector<double>& x, double peak) {
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs <= 0.0) return;
  const double g = peak / max_abs;
  for (double& v : x) v *= g;
}

// half-cosine fade at both ends; keeps event onsets/offsets click-free
void apply_ramps(std::vector<double>& x, double ramp_s, int sample_rate_hz) {
  const std::size_t ramp =
      std::min(x.size() / 2, duration_samples(ramp_s, sample_rate_hz));
  for (std::size_t i = 0; i < ramp; ++i) {
    const double g =
        0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / ramp);
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

std::vector<double> render_sb_component(double duration_s, double carrier_hz,
                                        double end_fraction,
                                        int sample_rate_hz) {
  const std::size_t n = duration_samples(duration_s, sample_rate_hz);
  const double tau = duration_s / std::log(1.0 / end_fraction);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    x[i] = std::exp(-t / tau) * std::sin(2.0 * kPi * carrier_hz * t);
  }
  return x;
}

}  // namespace

void PatternParams::validate(int sample_rate_hz) const {
  check_range(sb_duration_ms, "sb_duration_ms");
  check_range(mb_gap_ms, "mb_gap_ms");
  check_range(mb_duration_ms, "mb_duration_ms");
  check_range(crs_passband_hz, "crs_passband_hz");
  check_range(crs_duration_ms, "crs_duration_ms");
  check_range(hs_fundamental_hz, "hs_fundamental_hz");
  check_range(hs_duration_ms, "hs_duration_ms");
  if (mb_components[0] < 2 || mb_components[1] < mb_components[0])
    throw ConfigError("mb_components must satisfy 2 <= lo <= hi");
  if (hs_harmonics[0] < 1 || hs_harmonics[1] < hs_harmonics[0])
    throw ConfigError("hs_harmonics must satisfy 1 <= lo <= hi");
  if (!(sb_carrier_center_hz > 0.0) || !(sb_carrier_spread_hz >= 0.0))
    throw ConfigError("bad SB carrier parameters");
  if (!(sb_decay_end_fraction > 0.0) || !(sb_decay_end_fraction < 1.0))
    throw ConfigError("sb_decay_end_fraction must be in (0, 1)");
  if (!(crs_envelope_roughness >= 0.0) || !(crs_envelope_roughness < 1.0))
    throw ConfigError("crs_envelope_roughness must be in [0, 1)");
  if (crs_passband_hz[1] >= 0.5 * sample_rate_hz)
    throw ConfigError("CRS passband upper edge must be below Nyquist");
  if (hs_fundamental_hz[1] * hs_harmonics[1] >= 0.5 * sample_rate_hz)
    throw ConfigError("HS harmonics exceed Nyquist");
}

void CorpusConfig::validate() const {
  if (n_subjects < 0) throw ConfigError("n_subjects must be >= 0");
  if (!(recording_len_s > 0.0)) throw ConfigError("recording_len_s must be > 0");
  if (!(events_per_minute >= 0.0))
    throw ConfigError("events_per_minute must be >= 0");
  if (sample_rate_hz < 8000) throw ConfigError("sample_rate_hz must be >= 8000");
  double sum = 0.0;
  for (double p : class_mixture) {
    if (p < 0.0) throw ConfigError("class_mixture entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("class_mixture must sum to 1");
  patterns.validate(sample_rate_hz);
}

EventShape draw_event_shape(PatternLabel pattern, const PatternParams& params,
                            Rng& rng) {
  EventShape shape;
  shape.label = pattern;
  switch (pattern) {
    case PatternLabel::SB: {
      shape.duration_s =
          rng.uniform(params.sb_duration_ms[0], params.sb_duration_ms[1]) *
          1e-3;
      shape.sb_carrier_hz =
          params.sb_carrier_center_hz +
          rng.uniform(-params.sb_carrier_spread_hz, params.sb_carrier_spread_hz);
      break;
    }
    case PatternLabel::MB: {
      const int n_comp =
          rng.uniform_int(params.mb_components[0], params.mb_components[1]);
      double comp_total = 0.0, gap_total = 0.0;
      for (int i = 0; i < n_comp; ++i) {
        const double d =
            rng.uniform(params.sb_duration_ms[0], params.sb_duration_ms[1]) *
            1e-3;
        const double f = params.sb_carrier_center_hz +
                         rng.uniform(-params.sb_carrier_spread_hz,
                                     params.sb_carrier_spread_hz);
        shape.mb_component_dur_s.push_back(d);
        shape.mb_component_hz.push_back(f);
        comp_total += d;
      }
      for (int i = 0; i + 1 < n_comp; ++i) {
        const double gsec =
            rng.uniform(params.mb_gap_ms[0], params.mb_gap_ms[1]) * 1e-3;
        shape.mb_gap_s.push_back(gsec);
        gap_total += gsec;
      }
      // clamp total into range by rescaling the gaps, never the bursts
      const double lo = params.mb_duration_ms[0] * 1e-3;
      const double hi = params.mb_duration_ms[1] * 1e-3;
      double total = comp_total + gap_total;
      if (gap_total > 0.0 && (total < lo || total > hi)) {
        const double target = std::clamp(total, lo, hi);
        const double scale = (target - comp_total) / gap_total;
        for (double& gsec : shape.mb_gap_s) gsec *= scale;
        total = target;
      }
      shape.duration_s = total;
      break;
    }
    case PatternLabel::CRS: {
      shape.duration_s =
          rng.uniform(params.crs_duration_ms[0], params.crs_duration_ms[1]) *
          1e-3;
      const int n_knots =
          2 + static_cast<int>(shape.duration_s * 1e3 /
                               params.crs_envelope_knot_ms);
      shape.crs_env_knots.resize(n_knots);
      for (double& k : shape.crs_env_knots)
        k = rng.uniform(1.0 - params.crs_envelope_roughness, 1.0);
      shape.crs_noise_seed = rng.next_u64();
      break;
    }
    case PatternLabel::HS: {
      shape.duration_s =
          rng.uniform(params.hs_duration_ms[0], params.hs_duration_ms[1]) *
          1e-3;
      shape.hs_f0_hz =
          rng.uniform(params.hs_fundamental_hz[0], params.hs_fundamental_hz[1]);
      shape.hs_n_harmonics =
          rng.uniform_int(params.hs_harmonics[0], params.hs_harmonics[1]);
      break;
    }
    case PatternLabel::NonBS:
      throw InvalidPatternError("cannot synthesize a NonBS event");
  }
  return shape;
}

Waveform render_event(const EventShape& shape, const PatternParams& params,
                      int sample_rate_hz) {
  Waveform wf;
  wf.sample_rate_hz = sample_rate_hz;
  std::vector<double>& x = wf.samples;

  switch (shape.label) {
    case PatternLabel::SB: {
      x = render_sb_component(shape.duration_s, shape.sb_carrier_hz,
                              params.sb_decay_end_fraction, sample_rate_hz);
      break;
    }
    case PatternLabel::MB: {
      x.assign(duration_samples(shape.duration_s, sample_rate_hz), 0.0);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < shape.mb_component_dur_s.size(); ++i) {
        const std::vector<double> comp = render_sb_component(
            shape.mb_component_dur_s[i], shape.mb_component_hz[i],
            params.sb_decay_end_fraction, sample_rate_hz);
        for (std::size_t j = 0; j < comp.size() && pos + j < x.size(); ++j)
          x[pos + j] = comp[j];
        pos += comp.size();
        if (i < shape.mb_gap_s.size())
          pos += duration_samples(shape.mb_gap_s[i], sample_rate_hz);
        if (pos >= x.size()) break;
      }
      break;
    }
    case PatternLabel::CRS: {
      const std::size_t n = duration_samples(shape.duration_s, sample_rate_hz);
      // pad both sides so the filter transient never touches the event
      const std::size_t pad = static_cast<std::size_t>(
          8.0 * sample_rate_hz / params.crs_passband_hz[0]);
      std::vector<double> noise(n + 2 * pad);
      Rng noise_rng(shape.crs_noise_seed);
      for (double& v : noise) v = noise_rng.normal();
      bandpass_filtfilt(noise, params.crs_passband_hz[0],
                        params.crs_passband_hz[1], sample_rate_hz);
      x.assign(noise.begin() + pad, noise.begin() + pad + n);
      // piecewise-linear envelope over the knots
      const std::size_t n_knots = shape.crs_env_knots.size();
      for (std::size_t i = 0; i < n; ++i) {
        const double pos = static_cast<double>(i) / n * (n_knots - 1);
        const std::size_t k = std::min(static_cast<std::size_t>(pos), n_knots - 2);
        const double frac = pos - static_cast<double>(k);
        x[i] *= shape.crs_env_knots[k] * (1.0 - frac) +
                shape.crs_env_knots[k + 1] * frac;
      }
      apply_ramps(x, 0.010, sample_rate_hz);
      break;
    }
    case PatternLabel::HS: {
      const std::size_t n = duration_samples(shape.duration_s, sample_rate_hz);
      x.assign(n, 0.0);
      for (int k = 1; k <= shape.hs_n_harmonics; ++k) {
        const double amp = 1.0 / k;
        const double f = shape.hs_f0_hz * k;
        for (std::size_t i = 0; i < n; ++i)
          x[i] += amp * std::sin(2.0 * kPi * f * static_cast<double>(i) /
                                 sample_rate_hz);
      }
      apply_ramps(x, 0.010, sample_rate_hz);
      break;
    }
    case PatternLabel::NonBS:
      throw InvalidPatternError("cannot synthesize a NonBS event");
  }

  normalize_peak(x, kPeakAmplitude);
  return wf;
}

Waveform synth_event(PatternLabel pattern, const PatternParams& params,
                     int sample_rate_hz, Rng& rng) {
  params.validate(sample_rate_hz);
  const EventShape shape = draw_event_shape(pattern, params, rng);
  return render_event(shape, params, sample_rate_hz);
}

TimelinePlan plan_recording(const CorpusConfig& cfg, Rng& rng) {
  const double len = cfg.recording_len_s;
  const int n_events =
      rng.poisson(cfg.events_per_minute * len / 60.0);

  TimelinePlan plan;
  struct Placed {
    double start, end;
    EventShape shape;
  };
  std::vector<Placed> placed;
  placed.reserve(n_events);

  for (int e = 0; e < n_events; ++e) {
    // pattern from the mixture
    const double u = rng.uniform();
    double cum = 0.0;
    PatternLabel label = kMixtureLabels.back();
    for (std::size_t i = 0; i < kMixtureLabels.size(); ++i) {
      cum += cfg.class_mixture[i];
      if (u < cum) {
        label = kMixtureLabels[i];
        break;
      }
    }
    EventShape shape = draw_event_shape(label, cfg.patterns, rng);
    if (shape.duration_s >= len)
      throw PlacementFailureError("event longer than the recording");

    bool ok = false;
    for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
      const double start = rng.uniform(0.0, len - shape.duration_s);
      const double end = start + shape.duration_s;
      bool overlaps = false;
      for (const Placed& p : placed)
        if (start < p.end && p.start < end) {
          overlaps = true;
          break;
        }
      if (!overlaps) {
        placed.push_back({start, end, std::move(shape)});
        ok = true;
        break;
      }
    }
    if (!ok)
      throw PlacementFailureError(
          "could not place event " + std::to_string(e) + " of " +
          std::to_string(n_events) + " without overlap; lower events_per_minute");
  }

  std::sort(placed.begin(), placed.end(),
            [](const Placed& a, const Placed& b) { return a.start < b.start; });
  for (Placed& p : placed) {
    plan.events.push_back({p.start, p.end, p.shape.label});
    plan.shapes.push_back(std::move(p.shape));
  }
  return plan;
}

AnnotatedRecording synth_recording(const CorpusConfig& cfg,
                                   const std::string& subject_id, Rng& rng) {
  cfg.validate();
  const TimelinePlan plan = plan_recording(cfg, rng);
  const std::size_t n_total =
      duration_samples(cfg.recording_len_s, cfg.sample_rate_hz);

  AnnotatedRecording rec;
  rec.subject_id = subject_id;
  rec.waveform.sample_rate_hz = cfg.sample_rate_hz;
  rec.waveform.samples.assign(n_total, 0.0);
  rec.events = plan.events;

  // render events and measure their realized mean power for the SNR anchor
  double event_energy = 0.0;
  std::size_t event_samples = 0;
  for (std::size_t i = 0; i < plan.shapes.size(); ++i) {
    const Waveform ev =
        render_event(plan.shapes[i], cfg.patterns, cfg.sample_rate_hz);
    const std::size_t start = static_cast<std::size_t>(
        std::llround(plan.events[i].start_s * cfg.sample_rate_hz));
    for (std::size_t j = 0; j < ev.samples.size() && start + j < n_total; ++j)
      rec.waveform.samples[start + j] += ev.samples[j];
    for (double s : ev.samples) event_energy += s * s;
    event_samples += ev.samples.size();
  }
  const double mean_event_power =
      event_samples > 0 ? event_energy / static_cast<double>(event_samples)
                        : kNominalEventPower;

  const double noise_power =
      mean_event_power / std::pow(10.0, cfg.noise_floor_snr_db / 10.0);
  const double sigma = std::sqrt(noise_power);
  for (double& s : rec.waveform.samples) s += sigma * rng.normal();

  // keep samples inside [-1, 1]; rescale only when the mix clips
  double max_abs = 0.0;
  for (double s : rec.waveform.samples) max_abs = std::max(max_abs, std::abs(s));
  if (max_abs > 0.999) {
    const double g = 0.999 / max_abs;
    for (double& s : rec.waveform.samples) s *= g;
  }
  return rec;
}

std::string corpus_subject_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%03d", index + 1);
  return buf;
}

Rng corpus_subject_rng(const CorpusConfig& cfg, int index) {
  return Rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));
}

std::vector<AnnotatedRecording> synth_corpus(const CorpusConfig& cfg) {
  cfg.validate();
  std::vector<AnnotatedRecording> out;
  out.reserve(cfg.n_subjects);
  for (int i = 0; i < cfg.n_subjects; ++i) {
    Rng rng = corpus_subject_rng(cfg, i);
    out.push_back(synth_recording(cfg, corpus_subject_id(i), rng));
  }
  return out;
}

std::vector<std::pair<std::string, TimelinePlan>> synth_corpus_timelines(
    const CorpusConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<std::string, TimelinePlan>> out;
  out.reserve(cfg.n_subjects);
  for (int i = 0; i < cfg.n_subjects; ++i) {
    Rng rng = corpus_subject_rng(cfg, i);
    out.emplace_back(corpus_subject_id(i), plan_recording(cfg, rng));
  }
  return out;
}

}  // namespace bsb
