#include "bsbench/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace bsb {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

PatternLabel parse_label(std::string_view text) {
  const std::string t = lower(text);
  if (t == "none" || t == "non-bs") return PatternLabel::NonBS;
  if (t == "sb") return PatternLabel::SB;
  if (t == "mb") return PatternLabel::MB;
  if (t == "crs") return PatternLabel::CRS;
  if (t == "hs") return PatternLabel::HS;
  throw UnknownLabelError("unknown pattern label: \"" + std::string(text) +
                          "\"");
}

std::string render_label(PatternLabel label) {
  switch (label) {
    case PatternLabel::NonBS:
      return "None";
    case PatternLabel::SB:
      return "SB";
    case PatternLabel::MB:
      return "MB";
    case PatternLabel::CRS:
      return "CRS";
    case PatternLabel::HS:
      return "HS";
  }
  throw UnknownLabelError("invalid PatternLabel value");
}

std::vector<Violation> validate_recording(const AnnotatedRecording& rec) {
  std::vector<Violation> out;

  if (rec.waveform.samples.empty())
    out.push_back({-1, "waveform is empty"});
  if (rec.waveform.sample_rate_hz < 8000)
    out.push_back({-1, "sample rate below 8000 Hz"});
  for (size_t i = 0; i < rec.waveform.samples.size(); ++i) {
    const double s = rec.waveform.samples[i];
    if (!std::isfinite(s)) {
      out.push_back({-1, "non-finite sample at index " + std::to_string(i)});
      break;
    }
    if (s < -1.0 || s > 1.0) {
      out.push_back({-1, "sample out of [-1, 1] at index " + std::to_string(i)});
      break;
    }
  }

  const double duration = rec.waveform.duration_s();
  for (size_t i = 0; i < rec.events.size(); ++i) {
    const Annotation& ev = rec.events[i];
    const int idx = static_cast<int>(i);
    if (!(ev.end_s > ev.start_s))
      out.push_back({idx, "end before start"});
    if (ev.start_s < 0.0)
      out.push_back({idx, "negative start time"});
    if (ev.label == PatternLabel::NonBS)
      out.push_back({idx, "explicit NonBS annotation"});
    if (ev.end_s > duration + 1e-9)
      out.push_back({idx, "event extends past end of waveform"});
    if (i > 0) {
      const Annotation& prev = rec.events[i - 1];
      if (ev.start_s < prev.start_s)
        out.push_back({idx, "events not sorted by start time"});
      if (ev.start_s < prev.end_s && prev.start_s < ev.end_s)
        out.push_back({idx, "overlaps previous event"});
    }
  }
  return out;
}

}  // namespace bsb
