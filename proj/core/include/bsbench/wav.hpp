#pragma once

#include <string>

#include "bsbench/types.hpp"

namespace bsb {

struct NotWavError : DataError {
  using DataError::DataError;
};
struct UnsupportedEncodingError : DataError {
  using DataError::DataError;
};
struct MultiChannelError : DataError {
  using DataError::DataError;
};
struct TruncatedError : DataError {
  using DataError::DataError;
};
struct IoFailure : DataError {
  using DataError::DataError;
};

enum class WavBitDepth { Pcm16, Float32 };

struct WavInfo {
  int sample_rate_hz = 0;
  std::size_t n_samples = 0;
  WavBitDepth bit_depth = WavBitDepth::Pcm16;
  int n_channels = 1;
};

// RIFF/WAVE, mono, PCM16LE or IEEE float32. 16-bit samples are normalized
// by 32768 into [-1, 1); unknown chunks are skipped.
Waveform read_wav(const std::string& path);
Waveform read_wav(const std::string& path, WavInfo& info);

// Samples must be in [-1, 1]; the 16-bit path rounds to nearest and clamps.
void write_wav(const std::string& path, const Waveform& wf,
               WavBitDepth bit_depth = WavBitDepth::Pcm16);

}  // namespace bsb
