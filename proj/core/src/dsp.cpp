#include "bsbench/dsp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bsbench/fft.hpp"

namespace bsb {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void DspConfig::validate(int sample_rate_hz) const {
  if (n_fft < 2) throw ConfigError("n_fft must be >= 2");
  if (hop < 1 || hop > n_fft) throw ConfigError("hop must be in [1, n_fft]");
  if (n_mels < 1) throw ConfigError("n_mels must be >= 1");
  if (n_mfcc < 1 || n_mfcc > n_mels)
    throw ConfigError("n_mfcc must be in [1, n_mels]");
  const double fmax = effective_fmax(sample_rate_hz);
  if (!(fmin_hz >= 0.0) || !(fmin_hz < fmax))
    throw ConfigError("need 0 <= fmin < fmax");
  if (fmax > 0.5 * sample_rate_hz + 1e-9)
    throw ConfigError("fmax above Nyquist");
  if (!(log_floor_eps > 0.0)) throw ConfigError("log_floor_eps must be > 0");
}

std::vector<double> hamming_window_periodic(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / n);
  return w;
}

ComplexSpectrogram stft(const Waveform& wf, const DspConfig& cfg) {
  cfg.validate(wf.sample_rate_hz);
  const std::size_t n = wf.samples.size();
  const std::size_t n_fft = static_cast<std::size_t>(cfg.n_fft);
  const std::size_t hop = static_cast<std::size_t>(cfg.hop);
  if (n < n_fft)
    throw TooShortError("signal shorter than n_fft (" + std::to_string(n) +
                        " < " + std::to_string(n_fft) + ")");

  const std::size_t n_frames = (n - n_fft) / hop + 1;
  const std::size_t n_bins = n_fft / 2 + 1;
  const std::vector<double> window = hamming_window_periodic(n_fft);

  ComplexSpectrogram out;
  out.values.resize(n_frames * n_bins);
  out.n_frames = n_frames;
  out.n_bins = n_bins;
  out.sample_rate_hz = wf.sample_rate_hz;
  out.n_fft = cfg.n_fft;
  out.hop = cfg.hop;

  std::vector<double> frame(n_fft);
  for (std::size_t m = 0; m < n_frames; ++m) {
    const double* x = wf.samples.data() + m * hop;
    for (std::size_t i = 0; i < n_fft; ++i) frame[i] = window[i] * x[i];
    const std::vector<std::complex<double>> spectrum =
        rfft_onesided(frame.data(), n_fft);
    for (std::size_t k = 0; k < n_bins; ++k) out.at(m, k) = spectrum[k];
  }
  return out;
}

Spectrogram power_spectrogram(const ComplexSpectrogram& cs) {
  Spectrogram out;
  out.values = Matrix(cs.n_frames, cs.n_bins);
  out.sample_rate_hz = cs.sample_rate_hz;
  out.hop = cs.hop;
  out.linear_bin_hz =
      static_cast<double>(cs.sample_rate_hz) / static_cast<double>(cs.n_fft);
  for (std::size_t m = 0; m < cs.n_frames; ++m)
    for (std::size_t k = 0; k < cs.n_bins; ++k)
      out.values(m, k) = std::norm(cs.at(m, k));
  return out;
}

double mel_scale(double f_hz) {
  if (f_hz < 0.0) throw NegativeFrequencyError("negative frequency");
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) {
  if (mel < 0.0) throw NegativeFrequencyError("negative mel value");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank build_filterbank(const DspConfig& cfg, int sample_rate_hz) {
  cfg.validate(sample_rate_hz);
  const std::size_t n_bins = static_cast<std::size_t>(cfg.n_fft) / 2 + 1;
  const std::size_t n_mels = static_cast<std::size_t>(cfg.n_mels);
  const double fmin = cfg.fmin_hz;
  const double fmax = cfg.effective_fmax(sample_rate_hz);

  // n_mels + 2 break points equally spaced on the mel axis
  std::vector<double> points_hz(n_mels + 2);
  const double mel_lo = mel_scale(fmin);
  const double mel_hi = mel_scale(fmax);
  for (std::size_t i = 0; i < points_hz.size(); ++i) {
    const double mel =
        mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (n_mels + 1);
    points_hz[i] = mel_to_hz(mel);
  }

  MelFilterbank fb;
  fb.weights = Matrix(n_mels, n_bins);
  fb.center_hz.assign(points_hz.begin() + 1, points_hz.end() - 1);

  const double bin_hz =
      static_cast<double>(sample_rate_hz) / static_cast<double>(cfg.n_fft);
  for (std::size_t k = 0; k < n_mels; ++k) {
    const double left = points_hz[k];
    const double apex = points_hz[k + 1];
    const double right = points_hz[k + 2];
    bool any = false;
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double f = static_cast<double>(b) * bin_hz;
      double w = 0.0;
      if (f > left && f < apex) {
        w = (f - left) / (apex - left);
      } else if (f == apex) {
        w = 1.0;
      } else if (f > apex && f < right) {
        w = (right - f) / (right - apex);
      }
      fb.weights(k, b) = w;
      any = any || w > 0.0;
    }
    if (!any)
      throw TooManyMelsError("mel filter " + std::to_string(k) +
                             " covers no FFT bin; reduce n_mels");
  }
  return fb;
}

namespace {

// power (frames x bins) through fb -> mel energies (frames x n_mels)
Matrix apply_filterbank(const Spectrogram& power, const MelFilterbank& fb) {
  const std::size_t n_frames = power.values.rows();
  const std::size_t n_bins = power.values.cols();
  if (fb.weights.cols() != n_bins)
    throw ShapeMismatchError("filterbank bin count " +
                             std::to_string(fb.weights.cols()) +
                             " != spectrogram bin count " +
                             std::to_string(n_bins));
  const std::size_t n_mels = fb.weights.rows();
  Matrix mel(n_frames, n_mels);
  for (std::size_t m = 0; m < n_frames; ++m) {
    const double* p = power.values.row(m);
    for (std::size_t k = 0; k < n_mels; ++k) {
      const double* w = fb.weights.row(k);
      double acc = 0.0;
      for (std::size_t b = 0; b < n_bins; ++b) acc += p[b] * w[b];
      mel(m, k) = acc;
    }
  }
  return mel;
}

}  // namespace

Spectrogram log_mel(const Spectrogram& power, const MelFilterbank& fb) {
  Matrix mel = apply_filterbank(power, fb);
  for (double& v : mel.data()) v = std::log1p(v);
  Spectrogram out;
  out.values = std::move(mel);
  out.sample_rate_hz = power.sample_rate_hz;
  out.hop = power.hop;
  out.bin_center_hz = fb.center_hz;
  return out;
}

MfccMatrix mfcc(const Spectrogram& power, const MelFilterbank& fb,
                const DspConfig& cfg) {
  Matrix mel = apply_filterbank(power, fb);
  const std::size_t n_frames = mel.rows();
  const std::size_t n_mels = mel.cols();
  const std::size_t n_mfcc = static_cast<std::size_t>(cfg.n_mfcc);
  if (n_mfcc > n_mels) throw ShapeMismatchError("n_mfcc exceeds n_mels");

  for (double& v : mel.data()) v = std::log(cfg.log_floor_eps + v);

  const Matrix dct = dct_ii_orthonormal(n_mels);
  MfccMatrix out(n_frames, n_mfcc);
  for (std::size_t m = 0; m < n_frames; ++m) {
    const double* lm = mel.row(m);
    for (std::size_t c = 0; c < n_mfcc; ++c) {
      const double* d = dct.row(c);
      double acc = 0.0;
      for (std::size_t k = 0; k < n_mels; ++k) acc += d[k] * lm[k];
      out(m, c) = acc;
    }
  }
  return out;
}

Matrix dct_ii_orthonormal(std::size_t n) {
  Matrix d(n, n);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sc = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t m = 0; m < n; ++m)
      d(c, m) = (c == 0 ? s0 : sc) *
                std::cos(kPi * static_cast<double>(c) * (2.0 * m + 1.0) /
                         (2.0 * static_cast<double>(n)));
  return d;
}

void write_spectrogram_csv(const std::string& path, const Spectrogram& spec,
                           const DspConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  char header[256];
  std::snprintf(header, sizeof(header),
                "{\"n_fft\":%d,\"hop\":%d,\"n_mels\":%d,\"fmin_hz\":%.17g,"
                "\"fmax_hz\":%.17g,\"n_mfcc\":%d,\"log_floor_eps\":%.17g,"
                "\"sample_rate_hz\":%d}",
                cfg.n_fft, cfg.hop, cfg.n_mels, cfg.fmin_hz, cfg.fmax_hz,
                cfg.n_mfcc, cfg.log_floor_eps, spec.sample_rate_hz);
  out << header << "\n";
  char buf[64];
  for (std::size_t r = 0; r < spec.values.rows(); ++r) {
    for (std::size_t c = 0; c < spec.values.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", spec.values(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace bsb
