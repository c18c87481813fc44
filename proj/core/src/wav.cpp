#include "bsbench/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace bsb {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    throw TruncatedError("unexpected end of file: " + path);
  return v;
}

}  // namespace

Waveform read_wav(const std::string& path) {
  WavInfo info;
  return read_wav(path, info);
}

Waveform read_wav(const std::string& path, WavInfo& info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open: " + path);

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "RIFF", 4) != 0)
    throw NotWavError("missing RIFF magic: " + path);
  read_u32(in, path);  // riff size, unreliable in practice
  if (!in.read(magic, 4) || std::memcmp(magic, "WAVE", 4) != 0)
    throw NotWavError("missing WAVE form type: " + path);

  FmtChunk fmt;
  bool have_fmt = false;
  Waveform wf;

  while (in.read(magic, 4)) {
    const std::uint32_t chunk_size = read_u32(in, path);
    if (std::memcmp(magic, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw NotWavError("fmt chunk too small: " + path);
      std::vector<char> raw(chunk_size);
      if (!in.read(raw.data(), chunk_size))
        throw TruncatedError("fmt chunk truncated: " + path);
      std::memcpy(&fmt.format, raw.data() + 0, 2);
      std::memcpy(&fmt.channels, raw.data() + 2, 2);
      std::memcpy(&fmt.sample_rate, raw.data() + 4, 4);
      std::memcpy(&fmt.bits_per_sample, raw.data() + 14, 2);
      have_fmt = true;
    } else if (std::memcmp(magic, "data", 4) == 0) {
      if (!have_fmt) throw NotWavError("data chunk before fmt: " + path);
      if (fmt.channels != 1)
        throw MultiChannelError("only mono is supported, file has " +
                                std::to_string(fmt.channels) + " channels: " +
                                path);
      const bool pcm16 = fmt.format == kFormatPcm && fmt.bits_per_sample == 16;
      const bool f32 = fmt.format == kFormatFloat && fmt.bits_per_sample == 32;
      if (!pcm16 && !f32)
        throw UnsupportedEncodingError(
            "unsupported encoding (format " + std::to_string(fmt.format) +
            ", " + std::to_string(fmt.bits_per_sample) + " bit): " + path);

      const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
      const std::size_t n = chunk_size / bytes_per_sample;
      std::vector<char> raw(chunk_size);
      if (!in.read(raw.data(), chunk_size))
        throw TruncatedError("data chunk shorter than header claims: " + path);

      wf.sample_rate_hz = static_cast<int>(fmt.sample_rate);
      wf.samples.resize(n);
      if (pcm16) {
        for (std::size_t i = 0; i < n; ++i) {
          std::int16_t s;
          std::memcpy(&s, raw.data() + 2 * i, 2);
          wf.samples[i] = static_cast<double>(s) / 32768.0;
        }
        info.bit_depth = WavBitDepth::Pcm16;
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          float s;
          std::memcpy(&s, raw.data() + 4 * i, 4);
          wf.samples[i] = static_cast<double>(s);
        }
        info.bit_depth = WavBitDepth::Float32;
      }
      info.sample_rate_hz = wf.sample_rate_hz;
      info.n_samples = n;
      info.n_channels = 1;
      return wf;
    } else {
      // skip unknown chunk (word-aligned)
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
      if (!in) throw TruncatedError("chunk skip ran past end: " + path);
    }
  }
  throw NotWavError("no data chunk found: " + path);
}

void write_wav(const std::string& path, const Waveform& wf,
               WavBitDepth bit_depth) {
  if (wf.samples.empty()) throw DataError("refusing to write empty waveform");
  for (double s : wf.samples)
    if (!std::isfinite(s) || s < -1.0 || s > 1.0)
      throw DataError("sample out of [-1, 1]");

  const bool pcm16 = bit_depth == WavBitDepth::Pcm16;
  const std::uint32_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(wf.samples.size()) * bytes_per_sample;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path);

  auto put_u32 = [&](std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    out.write(reinterpret_cast<const char*>(&v), 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(wf.sample_rate_hz));
  put_u32(static_cast<std::uint32_t>(wf.sample_rate_hz) * bytes_per_sample);
  put_u16(static_cast<std::uint16_t>(bytes_per_sample));
  put_u16(pcm16 ? 16 : 32);
  out.write("data", 4);
  put_u32(data_size);

  if (pcm16) {
    for (double s : wf.samples) {
      long q = std::lround(s * 32768.0);
      if (q > 32767) q = 32767;
      if (q < -32768) q = -32768;
      const std::int16_t v = static_cast<std::int16_t>(q);
      out.write(reinterpret_cast<const char*>(&v), 2);
    }
  } else {
    for (double s : wf.samples) {
      const float v = static_cast<float>(s);
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace bsb
