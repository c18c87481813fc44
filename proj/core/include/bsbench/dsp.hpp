#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bsbench/matrix.hpp"
#include "bsbench/types.hpp"

namespace bsb {

struct NegativeFrequencyError : DataError {
  using DataError::DataError;
};
struct TooManyMelsError : ConfigError {
  using ConfigError::ConfigError;
};

// Analysis configuration shared by the spectrogram and MFCC paths.
// fmax_hz <= 0 means "use Nyquist".
struct DspConfig {
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 64;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;
  int n_mfcc = 13;
  double log_floor_eps = 1e-10;

  double effective_fmax(int sample_rate_hz) const {
    return fmax_hz > 0.0 ? fmax_hz : 0.5 * sample_rate_hz;
  }
  void validate(int sample_rate_hz) const;
};

// Complex STFT frames. Frame m covers samples [m*hop, m*hop + n_fft);
// bins 0..n_fft/2 are kept.
struct ComplexSpectrogram {
  std::vector<std::complex<double>> values;  // row-major frames x bins
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  int sample_rate_hz = 0;
  int n_fft = 0;
  int hop = 0;

  std::complex<double>& at(std::size_t frame, std::size_t bin) {
    return values[frame * n_bins + bin];
  }
  const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
    return values[frame * n_bins + bin];
  }
  double frame_time_s(std::size_t frame) const {
    return static_cast<double>(frame) * hop / sample_rate_hz;
  }
  double bin_hz(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate_hz / n_fft;
  }
};

// Non-negative real time-frequency matrix: power (frames x fft bins) or
// mel-domain (frames x n_mels).
struct Spectrogram {
  Matrix values;
  int sample_rate_hz = 0;
  int hop = 0;
  // Hz per linear bin; empty in the mel domain, where bin_center_hz holds
  // the filter centers instead.
  double linear_bin_hz = 0.0;
  std::vector<double> bin_center_hz;
};

// Triangular mel filters, one row per filter, columns over fft bins.
struct MelFilterbank {
  Matrix weights;  // n_mels x (n_fft/2 + 1)
  std::vector<double> center_hz;
};

using MfccMatrix = Matrix;

// Periodic Hamming window, 0.54 - 0.46 cos(2 pi n / N).
std::vector<double> hamming_window_periodic(std::size_t n);

ComplexSpectrogram stft(const Waveform& wf, const DspConfig& cfg);

// Elementwise squared magnitude.
Spectrogram power_spectrogram(const ComplexSpectrogram& cs);

// HTK-style mel scale: 2595 log10(1 + f/700).
double mel_scale(double f_hz);
double mel_to_hz(double mel);

// n_mels triangles with apexes equally spaced in mel between fmin and fmax,
// peak amplitude 1. Throws TooManyMelsError when a triangle has no bin.
MelFilterbank build_filterbank(const DspConfig& cfg, int sample_rate_hz);

// Mel energies through the filterbank, then log(1 + M).
Spectrogram log_mel(const Spectrogram& power, const MelFilterbank& fb);

// Mel energies, log(eps + M), orthonormal DCT-II over the mel axis, first
// n_mfcc coefficients.
MfccMatrix mfcc(const Spectrogram& power, const MelFilterbank& fb,
                const DspConfig& cfg);

// Orthonormal DCT-II matrix, rows are coefficients: D D^T = I.
Matrix dct_ii_orthonormal(std::size_t n);

// CSV matrix with a one-line JSON header echoing the config; golden-file
// friendly.
void write_spectrogram_csv(const std::string& path, const Spectrogram& spec,
                           const DspConfig& cfg);

}  // namespace bsb
