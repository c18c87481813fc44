#include "bsbench/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsbench/fft.hpp"
#include "bsbench/wav.hpp"

namespace bsb {

namespace {

constexpr double kActiveThresholdDbfs = -40.0;
constexpr double kLogEps = 1e-10;
// periodicity search band for the autocorrelation lag, in Hz
constexpr double kAcfMinHz = 50.0;
constexpr double kAcfMaxHz = 1000.0;

const char* kDescriptors[] = {"rms",     "log_energy", "zcr",
                              "centroid", "rolloff85", "flux",
                              "flatness", "dominant_hz", "acf_lag_ms"};
const char* kFunctionals[] = {"mean", "std", "min", "max", "p20", "p50", "p80"};

double percentile(std::vector<double> sorted, double q) {
  // values must already be sorted; linear interpolation between ranks
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

void summarize(const std::vector<double>& values, std::vector<double>& out) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());

  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());

  out.push_back(mean);
  out.push_back(std::sqrt(var));
  out.push_back(sorted.front());
  out.push_back(sorted.back());
  out.push_back(percentile(sorted, 0.20));
  out.push_back(percentile(sorted, 0.50));
  out.push_back(percentile(sorted, 0.80));
}

}  // namespace

FeatureSpec tabular_feature_spec() {
  FeatureSpec spec;
  spec.version = "bsfeat-v1";
  for (const char* d : kDescriptors)
    for (const char* f : kFunctionals)
      spec.names.push_back(std::string(d) + "_" + f);
  spec.names.push_back("active_fraction");
  spec.names.push_back("burst_count");
  spec.names.push_back("active_duration_s");
  return spec;
}

std::vector<double> extract_features(const Segment& seg, const DspConfig& cfg) {
  const ComplexSpectrogram cs = stft(seg.samples, cfg);
  const std::size_t n_frames = cs.n_frames;
  const std::size_t n_bins = cs.n_bins;
  const std::size_t n_fft = static_cast<std::size_t>(cfg.n_fft);
  const int sr = seg.samples.sample_rate_hz;

  const std::size_t min_lag = static_cast<std::size_t>(sr / kAcfMaxHz);
  const std::size_t max_lag =
      std::min(static_cast<std::size_t>(sr / kAcfMinHz), n_fft / 2);

  std::vector<double> rms(n_frames), log_energy(n_frames), zcr(n_frames),
      centroid(n_frames), rolloff(n_frames), flux(n_frames),
      flatness(n_frames), dominant(n_frames), acf_lag(n_frames);

  std::vector<double> prev_mag(n_bins, 0.0), mag(n_bins), s_full;
  for (std::size_t m = 0; m < n_frames; ++m) {
    const double* x =
        seg.samples.samples.data() + m * static_cast<std::size_t>(cfg.hop);

    // raw-frame stats
    double energy = 0.0;
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < n_fft; ++i) {
      energy += x[i] * x[i];
      if (i > 0 && x[i - 1] * x[i] < 0.0) ++crossings;
    }
    rms[m] = std::sqrt(energy / static_cast<double>(n_fft));
    log_energy[m] = std::log(kLogEps + energy / static_cast<double>(n_fft));
    zcr[m] = static_cast<double>(crossings) / static_cast<double>(n_fft - 1);

    // spectral stats on the windowed power spectrum
    double total_power = 0.0, weighted = 0.0, max_power = 0.0;
    std::size_t argmax = 0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double p = std::norm(cs.at(m, k));
      mag[k] = std::sqrt(p);
      total_power += p;
      weighted += p * cs.bin_hz(k);
      if (p > max_power) {
        max_power = p;
        argmax = k;
      }
    }

    double fl = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double d = mag[k] - prev_mag[k];
      fl += d * d;
    }
    flux[m] = m == 0 ? 0.0 : fl;
    std::swap(prev_mag, mag);

    if (total_power <= 0.0) {
      centroid[m] = rolloff[m] = flatness[m] = dominant[m] = acf_lag[m] = 0.0;
      continue;
    }

    centroid[m] = weighted / total_power;
    dominant[m] = cs.bin_hz(argmax);

    const double target = 0.85 * total_power;
    double cum = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      cum += std::norm(cs.at(m, k));
      if (cum >= target) {
        rolloff[m] = cs.bin_hz(k);
        break;
      }
    }

    // flatness with a floor relative to the frame peak, which keeps it
    // exactly invariant under amplitude scaling
    const double floor_p = 1e-12 * max_power;
    double log_sum = 0.0, lin_sum = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double p = std::norm(cs.at(m, k)) + floor_p;
      log_sum += std::log(p);
      lin_sum += p;
    }
    flatness[m] = std::exp(log_sum / static_cast<double>(n_bins)) /
                  (lin_sum / static_cast<double>(n_bins));

    // periodicity proxy: strongest lag of the circular autocorrelation of
    // the windowed frame, computed from the power spectrum it already has
    s_full.assign(n_fft, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double p = std::norm(cs.at(m, k));
      s_full[k] = p;
      if (k > 0 && k < n_fft - k) s_full[n_fft - k] = p;
    }
    const std::vector<std::complex<double>> acf =
        rfft_onesided(s_full.data(), n_fft);
    const double r0 = acf[0].real();
    if (r0 <= 0.0) {
      acf_lag[m] = 0.0;
    } else {
      std::size_t best = min_lag;
      for (std::size_t lag = min_lag; lag <= max_lag; ++lag)
        if (acf[lag].real() > acf[best].real()) best = lag;
      acf_lag[m] = static_cast<double>(best) / sr * 1e3;
    }
  }

  std::vector<double> out;
  out.reserve(66);
  for (const std::vector<double>* v :
       {&rms, &log_energy, &zcr, &centroid, &rolloff, &flux, &flatness,
        &dominant, &acf_lag})
    summarize(*v, out);

  const double threshold = std::pow(10.0, kActiveThresholdDbfs / 20.0);
  std::size_t active = 0, bursts = 0;
  bool prev_active = false;
  for (std::size_t m = 0; m < n_frames; ++m) {
    const bool a = rms[m] > threshold;
    if (a) {
      ++active;
      if (!prev_active) ++bursts;
    }
    prev_active = a;
  }
  out.push_back(static_cast<double>(active) / static_cast<double>(n_frames));
  out.push_back(static_cast<double>(bursts));
  out.push_back(static_cast<double>(active) * cfg.hop / sr);
  return out;
}

FeatureMatrix extract_matrix(const std::vector<Segment>& segments,
                             const DspConfig& cfg) {
  if (segments.empty()) throw DataError("no segments to extract features from");
  FeatureMatrix fm;
  fm.spec = tabular_feature_spec();
  fm.values = Matrix(segments.size(), fm.spec.names.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::vector<double> row = extract_features(segments[i], cfg);
    std::copy(row.begin(), row.end(), fm.values.row(i));
    fm.labels.push_back(segments[i].label);
    fm.subject_ids.push_back(segments[i].subject_id);
  }
  return fm;
}

FeatureSpec mfcc_stats_spec(const DspConfig& cfg) {
  FeatureSpec spec;
  spec.version = "bsmfccstats-v1";
  for (int c = 0; c < cfg.n_mfcc; ++c) {
    spec.names.push_back("mfcc" + std::to_string(c) + "_mean");
    spec.names.push_back("mfcc" + std::to_string(c) + "_std");
  }
  return spec;
}

std::vector<double> extract_mfcc_stats(const Segment& seg,
                                       const DspConfig& cfg) {
  const ComplexSpectrogram cs = stft(seg.samples, cfg);
  const Spectrogram power = power_spectrogram(cs);
  const MelFilterbank fb = build_filterbank(cfg, seg.samples.sample_rate_hz);
  const MfccMatrix m = mfcc(power, fb, cfg);

  std::vector<double> out;
  out.reserve(2 * m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) mean += m(r, c);
    mean /= static_cast<double>(m.rows());
    double var = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
      var += (m(r, c) - mean) * (m(r, c) - mean);
    var /= static_cast<double>(m.rows());
    out.push_back(mean);
    out.push_back(std::sqrt(var));
  }
  return out;
}

FeatureSpec mfcc_flat_spec(const DspConfig& cfg, std::size_t n_frames) {
  FeatureSpec spec;
  spec.version = "bsmfccflat-v1";
  for (std::size_t f = 0; f < n_frames; ++f)
    for (int c = 0; c < cfg.n_mfcc; ++c)
      spec.names.push_back("mfcc_f" + std::to_string(f) + "_c" +
                           std::to_string(c));
  return spec;
}

std::vector<double> extract_mfcc_flat(const Segment& seg,
                                      const DspConfig& cfg) {
  const ComplexSpectrogram cs = stft(seg.samples, cfg);
  const Spectrogram power = power_spectrogram(cs);
  const MelFilterbank fb = build_filterbank(cfg, seg.samples.sample_rate_hz);
  const MfccMatrix m = mfcc(power, fb, cfg);
  return m.data();
}

void write_feature_csv(const std::string& path, const FeatureMatrix& fm) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  for (std::size_t c = 0; c < fm.spec.names.size(); ++c)
    out << fm.spec.names[c] << ",";
  out << "label,subject_id\n";
  char buf[64];
  for (std::size_t r = 0; r < fm.values.rows(); ++r) {
    for (std::size_t c = 0; c < fm.values.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", fm.values(r, c));
      out << buf << ",";
    }
    out << render_label(fm.labels[r]) << "," << fm.subject_ids[r] << "\n";
  }
  if (!out) throw IoFailure("write failed: " + path);
}

FeatureMatrix read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty feature file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  FeatureMatrix fm;
  {
    std::istringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) fm.spec.names.push_back(col);
  }
  if (fm.spec.names.size() < 3 ||
      fm.spec.names[fm.spec.names.size() - 2] != "label" ||
      fm.spec.names.back() != "subject_id")
    throw DataError(path + ": expected trailing label,subject_id columns");
  fm.spec.names.resize(fm.spec.names.size() - 2);
  fm.spec.version = "file";

  const std::size_t n_cols = fm.spec.names.size();
  std::vector<double> flat;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!std::getline(ss, cell, ','))
        throw DataError(path + ":" + std::to_string(row) + ": short row");
      flat.push_back(std::stod(cell));
    }
    if (!std::getline(ss, cell, ','))
      throw DataError(path + ":" + std::to_string(row) + ": missing label");
    fm.labels.push_back(parse_label(cell));
    if (!std::getline(ss, cell))
      throw DataError(path + ":" + std::to_string(row) + ": missing subject");
    fm.subject_ids.push_back(cell);
  }
  fm.values = Matrix(fm.labels.size(), n_cols);
  std::copy(flat.begin(), flat.end(), fm.values.data().begin());
  return fm;
}

}  // namespace bsb
