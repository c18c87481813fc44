#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bsbench/dsp.hpp"
#include "bsbench/rng.hpp"

using namespace bsb;

TEST_SUITE_BEGIN("dsp");

namespace {

Waveform noise_waveform(std::size_t n, int sr, std::uint64_t seed) {
  Waveform wf;
  wf.sample_rate_hz = sr;
  wf.samples.resize(n);
  Rng rng(seed);
  for (double& v : wf.samples) v = rng.uniform(-0.9, 0.9);
  return wf;
}

DspConfig small_cfg() {
  DspConfig cfg;
  cfg.n_fft = 256;
  cfg.hop = 128;
  cfg.n_mels = 16;
  cfg.n_mfcc = 8;
  return cfg;
}

}  // namespace

TEST_CASE("stft frame count follows the hop formula") {
  DspConfig cfg;
  const Waveform wf = noise_waveform(88200, 44100, 1);
  const ComplexSpectrogram cs = stft(wf, cfg);
  CHECK(cs.n_frames == 169);
  CHECK(cs.n_bins == 1025);

  Waveform exact = noise_waveform(2048, 44100, 2);
  CHECK(stft(exact, cfg).n_frames == 1);
  Waveform tooshort = noise_waveform(2047, 44100, 3);
  CHECK_THROWS_AS(stft(tooshort, cfg), TooShortError);
}

TEST_CASE("constant input puts everything into bins 0 and 1") {
  DspConfig cfg = small_cfg();
  Waveform wf;
  wf.sample_rate_hz = 16000;
  wf.samples.assign(1024, 1.0);
  const ComplexSpectrogram cs = stft(wf, cfg);

  const std::vector<double> w = hamming_window_periodic(256);
  double wsum = 0.0;
  for (double v : w) wsum += v;  // 0.54 * N for the periodic window
  CHECK(wsum == doctest::Approx(0.54 * 256).epsilon(1e-12));

  for (std::size_t m = 0; m < cs.n_frames; ++m) {
    CHECK(std::abs(cs.at(m, 0)) == doctest::Approx(wsum).epsilon(1e-12));
    // the raised-cosine term lands exactly on bins +-1
    CHECK(std::abs(cs.at(m, 1)) ==
          doctest::Approx(0.23 * 256).epsilon(1e-9));
    for (std::size_t k = 2; k < cs.n_bins; ++k)
      CHECK(std::abs(cs.at(m, k)) < 1e-9 * wsum);
  }
}

TEST_CASE("bin-centered sinusoids localize exactly") {
  DspConfig cfg = small_cfg();
  for (int k : {5, 31, 60}) {
    Waveform wf;
    wf.sample_rate_hz = 16000;
    wf.samples.resize(768);
    for (std::size_t i = 0; i < wf.samples.size(); ++i)
      wf.samples[i] =
          std::cos(2.0 * M_PI * k * static_cast<double>(i) / cfg.n_fft);
    const ComplexSpectrogram cs = stft(wf, cfg);
    for (std::size_t m = 0; m < cs.n_frames; ++m) {
      std::size_t argmax = 0;
      for (std::size_t b = 1; b < cs.n_bins; ++b)
        if (std::abs(cs.at(m, b)) > std::abs(cs.at(m, argmax))) argmax = b;
      CHECK(argmax == static_cast<std::size_t>(k));
    }
  }
}

TEST_CASE("stft is linear in the input") {
  DspConfig cfg = small_cfg();
  const Waveform wf = noise_waveform(1024, 16000, 4);
  const ComplexSpectrogram base = stft(wf, cfg);
  for (double a : {2.0, 0.5, 3.0}) {
    Waveform scaled = wf;
    for (double& v : scaled.samples) v *= a;
    const ComplexSpectrogram cs = stft(scaled, cfg);
    for (std::size_t i = 0; i < cs.values.size(); ++i) {
      const std::complex<double> want = base.values[i] * a;
      CHECK(std::abs(cs.values[i] - want) <= 1e-12 * std::abs(want) + 1e-15);
    }
  }
}

TEST_CASE("per-frame Parseval with one-sided correction") {
  DspConfig cfg;
  const Waveform wf = noise_waveform(8192, 44100, 5);
  const ComplexSpectrogram cs = stft(wf, cfg);
  const std::vector<double> w =
      hamming_window_periodic(static_cast<std::size_t>(cfg.n_fft));

  for (std::size_t m = 0; m < cs.n_frames; ++m) {
    double time_energy = 0.0;
    const double* x = wf.samples.data() + m * cfg.hop;
    for (int i = 0; i < cfg.n_fft; ++i) {
      const double s = w[static_cast<std::size_t>(i)] * x[i];
      time_energy += s * s;
    }
    double spec_energy = 0.0;
    for (std::size_t k = 0; k < cs.n_bins; ++k) {
      const double c = (k == 0 || k == cs.n_bins - 1) ? 1.0 : 2.0;
      spec_energy += c * std::norm(cs.at(m, k));
    }
    spec_energy /= static_cast<double>(cfg.n_fft);
    CHECK(std::abs(spec_energy - time_energy) <= 1e-6 * time_energy);
  }
}

TEST_CASE("power spectrogram is the squared magnitude") {
  ComplexSpectrogram cs;
  cs.n_frames = 1;
  cs.n_bins = 2;
  cs.sample_rate_hz = 8000;
  cs.n_fft = 2;
  cs.hop = 1;
  cs.values = {{3.0, 4.0}, {0.0, 0.0}};
  const Spectrogram p = power_spectrogram(cs);
  CHECK(p.values(0, 0) == doctest::Approx(25.0));
  CHECK(p.values(0, 1) == 0.0);
}

TEST_CASE("mel scale fixed points and inverse identity") {
  CHECK(mel_scale(0.0) == 0.0);
  CHECK(mel_scale(1000.0) ==
        doctest::Approx(999.985537139624).epsilon(1e-12));
  for (double f : {50.0, 400.0, 1700.0})
    CHECK(mel_to_hz(mel_scale(f)) == doctest::Approx(f).epsilon(1e-9));
  CHECK_THROWS_AS(mel_scale(-1.0), NegativeFrequencyError);
  CHECK_THROWS_AS(mel_to_hz(-1.0), NegativeFrequencyError);
  // strictly increasing
  double prev = -1.0;
  for (double f = 0.0; f <= 8000.0; f += 250.0) {
    const double m = mel_scale(f);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("filterbank columns: unit sums between centers, zeros outside") {
  DspConfig cfg = small_cfg();
  cfg.fmin_hz = 500.0;
  cfg.fmax_hz = 4000.0;
  const int sr = 16000;
  const MelFilterbank fb = build_filterbank(cfg, sr);
  REQUIRE(fb.weights.rows() == 16);
  REQUIRE(fb.weights.cols() == 129);

  const double bin_hz = static_cast<double>(sr) / cfg.n_fft;
  const double first_center = fb.center_hz.front();
  const double last_center = fb.center_hz.back();
  for (std::size_t b = 0; b < fb.weights.cols(); ++b) {
    const double f = b * bin_hz;
    double col = 0.0;
    for (std::size_t k = 0; k < fb.weights.rows(); ++k) {
      CHECK(fb.weights(k, b) >= 0.0);
      col += fb.weights(k, b);
    }
    if (f <= cfg.fmin_hz || f >= cfg.fmax_hz) {
      CHECK(col == 0.0);
    } else {
      CHECK(col > 0.0);
      CHECK(col <= 2.0);
      // adjacent slopes are complementary strictly between the apexes
      if (f > first_center && f < last_center)
        CHECK(col == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  // each row is a contiguous triangle
  for (std::size_t k = 0; k < fb.weights.rows(); ++k) {
    std::size_t first = fb.weights.cols(), last = 0;
    for (std::size_t b = 0; b < fb.weights.cols(); ++b)
      if (fb.weights(k, b) > 0.0) {
        first = std::min(first, b);
        last = b;
      }
    REQUIRE(first <= last);
    for (std::size_t b = first; b <= last; ++b)
      CHECK(fb.weights(k, b) > 0.0);
  }
}

TEST_CASE("degenerate filterbanks") {
  DspConfig cfg = small_cfg();
  SUBCASE("single triangle spans the whole band") {
    cfg.n_mels = 1;
    cfg.n_mfcc = 1;
    const MelFilterbank fb = build_filterbank(cfg, 16000);
    double sum = 0.0;
    for (std::size_t b = 0; b < fb.weights.cols(); ++b)
      sum += fb.weights(0, b);
    CHECK(sum > 0.0);
  }
  SUBCASE("too many mels for the FFT resolution") {
    cfg.n_mels = 200;
    cfg.n_mfcc = 1;
    cfg.fmin_hz = 100.0;
    cfg.fmax_hz = 300.0;
    CHECK_THROWS_AS(build_filterbank(cfg, 16000), TooManyMelsError);
  }
}

TEST_CASE("log_mel of silence is exactly zero") {
  DspConfig cfg = small_cfg();
  const MelFilterbank fb = build_filterbank(cfg, 16000);
  Spectrogram power;
  power.values = Matrix(3, 129, 0.0);
  power.sample_rate_hz = 16000;
  power.hop = cfg.hop;
  const Spectrogram lm = log_mel(power, fb);
  for (double v : lm.values.data()) CHECK(v == 0.0);
}

TEST_CASE("log_mel applies log(1+M) and is monotone in power") {
  DspConfig cfg = small_cfg();
  const MelFilterbank fb = build_filterbank(cfg, 16000);
  const Waveform wf = noise_waveform(1024, 16000, 6);
  Spectrogram power = power_spectrogram(stft(wf, cfg));
  const Spectrogram lm1 = log_mel(power, fb);

  // log identity check through the filterbank on a crafted mel energy
  Spectrogram unit;
  unit.values = Matrix(1, 129, 0.0);
  unit.sample_rate_hz = 16000;
  // place (e-1) / weight into a bin where filter 0 has support
  std::size_t bin = 0;
  for (std::size_t b = 0; b < fb.weights.cols(); ++b)
    if (fb.weights(0, b) > 0.0) {
      bin = b;
      break;
    }
  unit.values(0, bin) = (std::exp(1.0) - 1.0) / fb.weights(0, bin);
  const Spectrogram lm_unit = log_mel(unit, fb);
  CHECK(lm_unit.values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  for (double& v : power.values.data()) v *= 2.0;
  const Spectrogram lm2 = log_mel(power, fb);
  for (std::size_t i = 0; i < lm1.values.data().size(); ++i) {
    if (lm1.values.data()[i] > 0.0)
      CHECK(lm2.values.data()[i] > lm1.values.data()[i]);
  }
}

TEST_CASE("orthonormal DCT-II satisfies D D^T = I") {
  for (std::size_t n : {8u, 64u, 128u}) {
    const Matrix d = dct_ii_orthonormal(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += d(i, k) * d(j, k);
        CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) <= 1e-9);
      }
  }
}

TEST_CASE("DCT rows match the direct cosine kernel on delta vectors") {
  const std::size_t n = 16;
  const Matrix d = dct_ii_orthonormal(n);
  for (std::size_t m = 0; m < n; ++m) {
    // transform of a delta at position m = c-th kernel sampled at m
    for (std::size_t c = 0; c < n; ++c) {
      const double scale = c == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      const double expected =
          scale * std::cos(M_PI * static_cast<double>(c) * (2.0 * m + 1.0) /
                           (2.0 * static_cast<double>(n)));
      CHECK(d(c, m) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("mfcc of silence keeps only coefficient zero") {
  DspConfig cfg = small_cfg();
  const MelFilterbank fb = build_filterbank(cfg, 16000);
  Spectrogram power;
  power.values = Matrix(4, 129, 0.0);
  power.sample_rate_hz = 16000;
  const MfccMatrix m = mfcc(power, fb, cfg);
  REQUIRE(m.rows() == 4);
  REQUIRE(m.cols() == 8);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    CHECK(m(r, 0) != 0.0);  // sqrt(n_mels) * log(eps)
    for (std::size_t c = 1; c < m.cols(); ++c)
      CHECK(std::abs(m(r, c)) <= 1e-12);
  }
}

TEST_CASE("mfcc shape follows the config") {
  DspConfig cfg;
  const Waveform wf = noise_waveform(88200, 44100, 7);
  const Spectrogram power = power_spectrogram(stft(wf, cfg));
  const MelFilterbank fb = build_filterbank(cfg, 44100);
  const MfccMatrix m = mfcc(power, fb, cfg);
  CHECK(m.rows() == 169);
  CHECK(m.cols() == 13);
  for (double v : m.data()) CHECK(std::isfinite(v));
}

TEST_CASE("spectrogram CSV export round-trips through the golden file") {
  DspConfig cfg = small_cfg();
  Waveform wf;
  wf.sample_rate_hz = 16000;
  wf.samples.resize(1024);
  Rng rng(123);
  for (std::size_t i = 0; i < wf.samples.size(); ++i)
    wf.samples[i] = 0.5 * std::sin(2.0 * M_PI * 440.0 * i / 16000.0) +
                    0.1 * rng.uniform(-1.0, 1.0);
  const MelFilterbank fb = build_filterbank(cfg, 16000);
  const Spectrogram lm = log_mel(power_spectrogram(stft(wf, cfg)), fb);

  const std::string golden = std::string(BSBENCH_TEST_DATA_DIR) +
                             "/golden_logmel_440hz_seed123.csv";
  std::ifstream in(golden);
  REQUIRE_MESSAGE(in.good(), "missing golden file " << golden);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("\"n_fft\":256") != std::string::npos);
  std::size_t r = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t c = 0, pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const double expected = std::stod(line.substr(pos, comma - pos));
      CHECK(lm.values(r, c) == doctest::Approx(expected).epsilon(1e-9));
      pos = comma + 1;
      ++c;
    }
    CHECK(c == lm.values.cols());
    ++r;
  }
  CHECK(r == lm.values.rows());
}

TEST_SUITE_END();
