#pragma once

#include <vector>

#include "bsbench/types.hpp"

namespace bsb {

// Sliding-window segmentation. Windows start at 0, stride_s, 2*stride_s, ...
// and a trailing remainder shorter than window_s is discarded.
struct WindowConfig {
  double window_s = 2.0;
  double stride_s = 1.0;

  void validate() const {
    if (!(stride_s > 0.0) || !(stride_s <= window_s))
      throw ConfigError("need 0 < stride_s <= window_s");
  }
};

// Label with the greatest temporal coverage of [t0, t0 + window_s);
// unannotated time counts as NonBS. Ties go to the rarer class in the fixed
// priority HS > CRS > MB > SB > NonBS.
PatternLabel dominant_label(const std::vector<Annotation>& events, double t0,
                            double window_s);

// Window count: floor((dur - window)/stride) + 1. Throws TooShort (from
// dsp.hpp's TooShortError family via DataError) when duration < window_s.
std::vector<Segment> segment_recording(const AnnotatedRecording& rec,
                                       const WindowConfig& cfg);

// Metadata-only segmentation of an event timeline; same windows and labels
// as segment_recording without touching audio.
std::vector<SegmentInfo> segment_timeline(const std::vector<Annotation>& events,
                                          double duration_s, int sample_rate_hz,
                                          const std::string& subject_id,
                                          const WindowConfig& cfg);

}  // namespace bsb
