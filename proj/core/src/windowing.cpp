#include "bsbench/windowing.hpp"

#include <algorithm>
#include <cmath>

namespace bsb {

PatternLabel dominant_label(const std::vector<Annotation>& events, double t0,
                            double window_s) {
  const double t1 = t0 + window_s;
  double coverage[kNumLabels] = {0.0, 0.0, 0.0, 0.0, 0.0};
  for (const Annotation& ev : events) {
    const double lo = std::max(ev.start_s, t0);
    const double hi = std::min(ev.end_s, t1);
    if (hi > lo) coverage[static_cast<int>(ev.label)] += hi - lo;
  }
  double annotated = 0.0;
  for (int i = 1; i < kNumLabels; ++i) annotated += coverage[i];
  coverage[0] = window_s - annotated;

  // descending rarity; strict > means the first (rarest) wins ties
  static constexpr PatternLabel priority[] = {
      PatternLabel::HS, PatternLabel::CRS, PatternLabel::MB, PatternLabel::SB,
      PatternLabel::NonBS};
  PatternLabel best = PatternLabel::NonBS;
  double best_cov = -1.0;
  for (PatternLabel lab : priority) {
    const double c = coverage[static_cast<int>(lab)];
    if (c > best_cov) {
      best_cov = c;
      best = lab;
    }
  }
  return best;
}

namespace {

struct WindowGrid {
  std::size_t window_n = 0;
  std::size_t stride_n = 0;
  std::size_t count = 0;
};

WindowGrid window_grid(std::size_t n_samples, int sample_rate_hz,
                       const WindowConfig& cfg) {
  cfg.validate();
  WindowGrid g;
  g.window_n = static_cast<std::size_t>(
      std::llround(cfg.window_s * sample_rate_hz));
  g.stride_n = static_cast<std::size_t>(
      std::llround(cfg.stride_s * sample_rate_hz));
  if (g.window_n == 0 || g.stride_n == 0)
    throw ConfigError("window/stride round to zero samples");
  if (n_samples < g.window_n)
    throw TooShortError("recording shorter than one window (" +
                        std::to_string(n_samples) + " < " +
                        std::to_string(g.window_n) + " samples)");
  g.count = (n_samples - g.window_n) / g.stride_n + 1;
  return g;
}

}  // namespace

std::vector<Segment> segment_recording(const AnnotatedRecording& rec,
                                       const WindowConfig& cfg) {
  const WindowGrid g = window_grid(rec.waveform.samples.size(),
                                   rec.waveform.sample_rate_hz, cfg);
  const int sr = rec.waveform.sample_rate_hz;
  const double window_dur = static_cast<double>(g.window_n) / sr;

  std::vector<Segment> out;
  out.reserve(g.count);
  for (std::size_t m = 0; m < g.count; ++m) {
    const std::size_t start = m * g.stride_n;
    Segment seg;
    seg.subject_id = rec.subject_id;
    seg.origin_s = static_cast<double>(start) / sr;
    seg.samples.sample_rate_hz = sr;
    seg.samples.samples.assign(rec.waveform.samples.begin() + start,
                               rec.waveform.samples.begin() + start +
                                   g.window_n);
    seg.label = dominant_label(rec.events, seg.origin_s, window_dur);
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<SegmentInfo> segment_timeline(const std::vector<Annotation>& events,
                                          double duration_s, int sample_rate_hz,
                                          const std::string& subject_id,
                                          const WindowConfig& cfg) {
  const std::size_t n_samples = static_cast<std::size_t>(
      std::llround(duration_s * sample_rate_hz));
  const WindowGrid g = window_grid(n_samples, sample_rate_hz, cfg);
  const double window_dur = static_cast<double>(g.window_n) / sample_rate_hz;

  std::vector<SegmentInfo> out;
  out.reserve(g.count);
  for (std::size_t m = 0; m < g.count; ++m) {
    SegmentInfo info;
    info.subject_id = subject_id;
    info.origin_s = static_cast<double>(m * g.stride_n) / sample_rate_hz;
    info.label = dominant_label(events, info.origin_s, window_dur);
    out.push_back(std::move(info));
  }
  return out;
}

}  // namespace bsb
