#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "bsbench/fft.hpp"
#include "bsbench/rng.hpp"
#include "bsbench/synth.hpp"
#include "bsbench/types.hpp"

using namespace bsb;

TEST_SUITE_BEGIN("synth");

namespace {

constexpr int kSr = 44100;

double duration_ms(const Waveform& wf) {
  return 1e3 * static_cast<double>(wf.samples.size()) / wf.sample_rate_hz;
}

// index of the largest magnitude bin of the full-signal FFT
double fft_peak_hz(const Waveform& wf) {
  const auto spectrum = rfft_onesided(wf.samples.data(), wf.samples.size());
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < spectrum.size(); ++k)
    if (std::abs(spectrum[k]) > std::abs(spectrum[argmax])) argmax = k;
  return static_cast<double>(argmax) * wf.sample_rate_hz /
         static_cast<double>(wf.samples.size());
}

double band_energy_fraction(const Waveform& wf, double lo, double hi) {
  const auto spectrum = rfft_onesided(wf.samples.data(), wf.samples.size());
  const double bin_hz =
      static_cast<double>(wf.sample_rate_hz) / wf.samples.size();
  double total = 0.0, band = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double p = std::norm(spectrum[k]);
    total += p;
    const double f = k * bin_hz;
    if (f >= lo && f <= hi) band += p;
  }
  return band / total;
}

}  // namespace

TEST_CASE("SB events: duration range, carrier band, 0.9 peak") {
  PatternParams params;
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Waveform ev = synth_event(PatternLabel::SB, params, kSr, rng);
    const double ms = duration_ms(ev);
    CHECK(ms >= 10.0 - 0.05);
    CHECK(ms <= 30.0 + 0.05);
    const double peak_hz = fft_peak_hz(ev);
    CHECK(peak_hz >= 300.0);
    CHECK(peak_hz <= 500.0);
    double peak = 0.0;
    for (double s : ev.samples) peak = std::max(peak, std::abs(s));
    CHECK(peak == doctest::Approx(0.9).epsilon(1e-9));
  }
}

TEST_CASE("event durations stay inside the configured ranges") {
  PatternParams params;
  Rng rng(2);
  const struct {
    PatternLabel label;
    double lo_ms, hi_ms;
  } cases[] = {{PatternLabel::SB, 10.0, 30.0},
               {PatternLabel::MB, 40.0, 1500.0},
               {PatternLabel::CRS, 200.0, 4000.0},
               {PatternLabel::HS, 50.0, 1500.0}};
  for (const auto& c : cases) {
    for (int i = 0; i < 1000; ++i) {
      const EventShape shape = draw_event_shape(c.label, params, rng);
      const double ms = shape.duration_s * 1e3;
      CHECK(ms >= c.lo_ms - 1e-9);
      CHECK(ms <= c.hi_ms + 1e-9);
    }
  }
}

TEST_CASE("HS spectra peak at harmonics of the fundamental") {
  PatternParams params;
  Rng rng(3);
  for (int i = 0; i < 25; ++i) {
    EventShape shape = draw_event_shape(PatternLabel::HS, params, rng);
    // need enough samples for 1-bin resolution near the fundamental
    if (shape.duration_s < 0.5) continue;
    const Waveform ev = render_event(shape, params, kSr);
    const auto spectrum = rfft_onesided(ev.samples.data(), ev.samples.size());
    const double bin_hz = static_cast<double>(kSr) / ev.samples.size();
    for (int k = 1; k <= shape.hs_n_harmonics; ++k) {
      const double f = shape.hs_f0_hz * k;
      const std::size_t center = static_cast<std::size_t>(std::llround(f / bin_hz));
      // local peak within one bin of k*f0
      std::size_t best = center - 4;
      for (std::size_t b = center - 4; b <= center + 4; ++b)
        if (std::abs(spectrum[b]) > std::abs(spectrum[best])) best = b;
      CHECK(std::abs(static_cast<double>(best) - f / bin_hz) <= 1.0);
    }
  }
}

TEST_CASE("CRS events concentrate energy in the passband") {
  PatternParams params;
  Rng rng(4);
  for (int i = 0; i < 25; ++i) {
    const Waveform ev = synth_event(PatternLabel::CRS, params, kSr, rng);
    CHECK(band_energy_fraction(ev, 500.0, 1700.0) >= 0.90);
  }
}

TEST_CASE("synth_event rejects NonBS") {
  PatternParams params;
  Rng rng(5);
  CHECK_THROWS_AS(synth_event(PatternLabel::NonBS, params, kSr, rng),
                  InvalidPatternError);
}

TEST_CASE("zero event rate gives a pure noise floor") {
  CorpusConfig cfg;
  cfg.events_per_minute = 0.0;
  cfg.recording_len_s = 2.0;
  cfg.sample_rate_hz = 16000;
  Rng rng(6);
  const AnnotatedRecording rec = synth_recording(cfg, "s000", rng);
  CHECK(rec.events.empty());
  double power = 0.0;
  for (double s : rec.waveform.samples) power += s * s;
  power /= static_cast<double>(rec.waveform.samples.size());
  // nominal event power 0.405 at 15 dB below
  CHECK(power == doctest::Approx(0.405 / std::pow(10.0, 1.5)).epsilon(0.05));
}

TEST_CASE("generated recordings satisfy the recording invariants") {
  CorpusConfig cfg;
  cfg.n_subjects = 4;
  cfg.recording_len_s = 20.0;
  cfg.sample_rate_hz = 16000;
  cfg.seed = 7;
  for (const AnnotatedRecording& rec : synth_corpus(cfg))
    CHECK(validate_recording(rec).empty());
}

TEST_CASE("empirical SB share approaches the mixture") {
  CorpusConfig cfg;
  cfg.n_subjects = 10;
  cfg.recording_len_s = 60.0;
  cfg.seed = 8;
  std::size_t sb = 0, total = 0;
  for (const auto& [subject, plan] : synth_corpus_timelines(cfg))
    for (const Annotation& ev : plan.events) {
      ++total;
      sb += ev.label == PatternLabel::SB ? 1 : 0;
    }
  REQUIRE(total >= 100);
  const double share = static_cast<double>(sb) / static_cast<double>(total);
  CHECK(share >= 0.5853 - 0.15);
  CHECK(share <= 0.5853 + 0.15);
}

TEST_CASE("corpus generation is bitwise deterministic in the seed") {
  CorpusConfig cfg;
  cfg.n_subjects = 3;
  cfg.recording_len_s = 8.0;
  cfg.sample_rate_hz = 16000;
  cfg.seed = 9;
  const auto a = synth_corpus(cfg);
  const auto b = synth_corpus(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].subject_id == b[i].subject_id);
    REQUIRE(a[i].waveform.samples.size() == b[i].waveform.samples.size());
    bool identical = true;
    for (std::size_t s = 0; s < a[i].waveform.samples.size(); ++s)
      identical = identical &&
                  a[i].waveform.samples[s] == b[i].waveform.samples[s];
    CHECK(identical);
    REQUIRE(a[i].events.size() == b[i].events.size());
  }

  cfg.seed = 10;
  const auto c = synth_corpus(cfg);
  bool differs = false;
  for (std::size_t s = 0; s < std::min(c[0].waveform.samples.size(),
                                       a[0].waveform.samples.size());
       ++s)
    differs = differs || c[0].waveform.samples[s] != a[0].waveform.samples[s];
  CHECK(differs);
}

TEST_CASE("corpus size and ids follow the config") {
  CorpusConfig cfg;
  cfg.recording_len_s = 8.0;
  cfg.sample_rate_hz = 16000;
  cfg.events_per_minute = 10.0;

  SUBCASE("16 subjects, 16 distinct ids") {
    cfg.n_subjects = 16;
    const auto corpus = synth_corpus(cfg);
    REQUIRE(corpus.size() == 16);
    std::vector<std::string> ids;
    for (const auto& rec : corpus) ids.push_back(rec.subject_id);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  }
  SUBCASE("zero subjects is an empty corpus") {
    cfg.n_subjects = 0;
    CHECK(synth_corpus(cfg).empty());
  }
}

TEST_CASE("impossible densities raise PlacementFailure") {
  CorpusConfig cfg;
  cfg.n_subjects = 1;
  cfg.recording_len_s = 4.0;
  cfg.sample_rate_hz = 16000;
  cfg.events_per_minute = 2000.0;
  cfg.class_mixture = {0.0, 0.0, 1.0, 0.0};  // all CRS, 0.2-4 s each
  cfg.seed = 11;
  CHECK_THROWS_AS(synth_corpus(cfg), PlacementFailureError);
}

TEST_CASE("annotations never overlap and never leave the recording") {
  CorpusConfig cfg;
  cfg.n_subjects = 6;
  cfg.recording_len_s = 30.0;
  cfg.events_per_minute = 40.0;
  cfg.seed = 12;
  for (const auto& [subject, plan] : synth_corpus_timelines(cfg)) {
    for (std::size_t i = 0; i < plan.events.size(); ++i) {
      CHECK(plan.events[i].start_s >= 0.0);
      CHECK(plan.events[i].end_s <= cfg.recording_len_s + 1e-9);
      if (i > 0)
        CHECK(plan.events[i].start_s >= plan.events[i - 1].end_s - 1e-12);
    }
  }
}

TEST_CASE("config validation rejects bad parameter ranges") {
  CorpusConfig cfg;
  SUBCASE("mixture must sum to one") {
    cfg.class_mixture = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("passband above Nyquist") {
    cfg.sample_rate_hz = 8000;
    cfg.patterns.crs_passband_hz[1] = 5000.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("degenerate duration range") {
    cfg.patterns.sb_duration_ms[1] = cfg.patterns.sb_duration_ms[0];
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_SUITE_END();
