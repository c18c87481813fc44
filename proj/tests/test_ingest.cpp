#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "bsbench/dataset.hpp"
#include "bsbench/rng.hpp"
#include "bsbench/synth.hpp"
#include "bsbench/wav.hpp"

using namespace bsb;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("ingest");

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "bsbench_ingest_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("pcm16 normalization endpoints") {
  const fs::path path = temp_dir() / "endpoints.wav";
  Waveform wf;
  wf.sample_rate_hz = 44100;
  wf.samples = {-1.0, 0.5, 0.0};
  write_wav(path.string(), wf, WavBitDepth::Pcm16);

  WavInfo info;
  const Waveform back = read_wav(path.string(), info);
  REQUIRE(back.samples.size() == 3);
  CHECK(back.samples[0] == -1.0);       // stored -32768
  CHECK(back.samples[1] == 0.5);        // stored 16384
  CHECK(back.samples[2] == 0.0);
  CHECK(info.sample_rate_hz == 44100);
  CHECK(info.bit_depth == WavBitDepth::Pcm16);
  CHECK(info.n_channels == 1);
}

TEST_CASE("float32 files round-trip exactly") {
  const fs::path path = temp_dir() / "f32.wav";
  Waveform wf;
  wf.sample_rate_hz = 22050;
  Rng rng(21);
  wf.samples.resize(500);
  // float-representable samples round-trip bit-exactly
  for (double& v : wf.samples) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  write_wav(path.string(), wf, WavBitDepth::Float32);
  const Waveform back = read_wav(path.string());
  REQUIRE(back.samples.size() == wf.samples.size());
  for (std::size_t i = 0; i < wf.samples.size(); ++i)
    CHECK(back.samples[i] == wf.samples[i]);

  // write -> read -> write -> read is stationary
  const fs::path path2 = temp_dir() / "f32b.wav";
  write_wav(path2.string(), back, WavBitDepth::Float32);
  const Waveform back2 = read_wav(path2.string());
  for (std::size_t i = 0; i < wf.samples.size(); ++i)
    CHECK(back2.samples[i] == back.samples[i]);
}

TEST_CASE("pcm16 round-trip stays within the quantization bound") {
  const fs::path path = temp_dir() / "q16.wav";
  Waveform wf;
  wf.sample_rate_hz = 44100;
  Rng rng(22);
  wf.samples.resize(2000);
  for (double& v : wf.samples) v = rng.uniform(-1.0, 1.0);
  wf.samples[0] = 1.0;  // clamps to 32767
  wf.samples[1] = -1.0;
  write_wav(path.string(), wf, WavBitDepth::Pcm16);
  const Waveform back = read_wav(path.string());
  for (std::size_t i = 0; i < wf.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - wf.samples[i]) <= 1.0 / 32768.0);
}

TEST_CASE("wav reader rejects what it does not support") {
  const fs::path dir = temp_dir();

  SUBCASE("empty waveform refuses to write") {
    Waveform wf;
    wf.samples.clear();
    CHECK_THROWS_AS(write_wav((dir / "x.wav").string(), wf), DataError);
  }
  SUBCASE("bad magic") {
    const fs::path path = dir / "notwav.wav";
    std::ofstream out(path, std::ios::binary);
    out << "JUNKJUNKJUNKJUNKJUNK";
    out.close();
    CHECK_THROWS_AS(read_wav(path.string()), NotWavError);
  }
  SUBCASE("stereo rejected") {
    const fs::path path = dir / "stereo.wav";
    // hand-build a 2-channel header
    std::ofstream out(path, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36 + 8);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(1);
    u16(2);  // channels
    u32(44100);
    u32(44100 * 4);
    u16(4);
    u16(16);
    out.write("data", 4);
    u32(8);
    u32(0);
    u32(0);
    out.close();
    CHECK_THROWS_AS(read_wav(path.string()), MultiChannelError);
  }
  SUBCASE("truncated data chunk") {
    const fs::path good = dir / "good.wav";
    Waveform wf;
    wf.sample_rate_hz = 8000;
    wf.samples.assign(100, 0.1);
    write_wav(good.string(), wf);
    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 40);
    const fs::path bad = dir / "trunc.wav";
    std::ofstream out(bad, std::ios::binary);
    out << bytes;
    out.close();
    CHECK_THROWS_AS(read_wav(bad.string()), TruncatedError);
  }
  SUBCASE("unsupported bit depth") {
    const fs::path path = dir / "pcm24.wav";
    std::ofstream out(path, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(1);
    u16(1);
    u32(44100);
    u32(44100 * 3);
    u16(3);
    u16(24);  // 24-bit PCM unsupported
    out.write("data", 4);
    u32(0);
    out.close();
    CHECK_THROWS_AS(read_wav(path.string()), UnsupportedEncodingError);
  }
}

TEST_CASE("annotation CSV parses, sorts and validates") {
  const fs::path path = temp_dir() / "ann.csv";
  {
    std::ofstream out(path);
    out << "start_s,end_s,label\n";
    out << "0.50,0.60,MB\n";
    out << "0.10,0.25,SB\n";
  }
  const auto events = read_annotations(path.string());
  REQUIRE(events.size() == 2);
  CHECK(events[0].start_s == doctest::Approx(0.10));
  CHECK(events[0].end_s == doctest::Approx(0.25));
  CHECK(events[0].label == PatternLabel::SB);
  CHECK(events[1].label == PatternLabel::MB);
}

TEST_CASE("annotation CSV edge cases") {
  const fs::path dir = temp_dir();
  SUBCASE("header-only file is an empty list") {
    const fs::path path = dir / "empty.csv";
    std::ofstream(path) << "start_s,end_s,label\n";
    CHECK(read_annotations(path.string()).empty());
  }
  SUBCASE("parse errors carry the row number") {
    const fs::path path = dir / "bad.csv";
    std::ofstream(path) << "start_s,end_s,label\n0.1,0.2,SB\nx,0.3,SB\n";
    try {
      read_annotations(path.string());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
  }
  SUBCASE("unknown label is a parse error") {
    const fs::path path = dir / "badlabel.csv";
    std::ofstream(path) << "start_s,end_s,label\n0.1,0.2,zz\n";
    CHECK_THROWS_AS(read_annotations(path.string()), ParseError);
  }
  SUBCASE("overlap is rejected") {
    const fs::path path = dir / "overlap.csv";
    std::ofstream(path) << "start_s,end_s,label\n0.1,0.3,SB\n0.2,0.4,MB\n";
    CHECK_THROWS_AS(read_annotations(path.string()), OverlapError);
  }
}

TEST_CASE("annotation round-trip is exact at 6 decimals") {
  const fs::path path = temp_dir() / "rt.csv";
  std::vector<Annotation> events = {{0.123456, 0.234567, PatternLabel::SB},
                                    {1.000001, 2.5, PatternLabel::HS}};
  write_annotations(path.string(), events);
  const auto back = read_annotations(path.string());
  REQUIRE(back.size() == events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(back[i].start_s == doctest::Approx(events[i].start_s).epsilon(1e-9));
    CHECK(back[i].end_s == doctest::Approx(events[i].end_s).epsilon(1e-9));
    CHECK(back[i].label == events[i].label);
  }
}

TEST_CASE("manifest loads entries and aggregates failures") {
  const fs::path dir = temp_dir() / "manifest_case";
  fs::create_directories(dir);

  Waveform wf;
  wf.sample_rate_hz = 8000;
  wf.samples.assign(8000, 0.0);
  write_wav((dir / "a.wav").string(), wf);
  write_wav((dir / "b.wav").string(), wf);
  std::ofstream(dir / "a.csv") << "start_s,end_s,label\n0.1,0.2,SB\n";
  std::ofstream(dir / "b.csv") << "start_s,end_s,label\n";

  DatasetManifest manifest;
  manifest.entries = {{"a.wav", "a.csv", "subjA"}, {"b.wav", "b.csv", "subjB"}};
  write_manifest((dir / "manifest.json").string(), manifest);

  SUBCASE("two valid entries load") {
    const auto recs = load_manifest((dir / "manifest.json").string());
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].subject_id == "subjA");
    CHECK(recs[0].events.size() == 1);
    CHECK(recs[1].events.empty());
  }
  SUBCASE("a missing wav is reported by entry, others still checked") {
    manifest.entries.push_back({"missing.wav", "a.csv", "subjC"});
    write_manifest((dir / "manifest3.json").string(), manifest);
    try {
      load_manifest((dir / "manifest3.json").string());
      FAIL("expected ManifestError");
    } catch (const ManifestError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("entry 2") != std::string::npos);
      CHECK(msg.find("subjC") != std::string::npos);
      CHECK(msg.find("1 entry failed") != std::string::npos);
    }
  }
}

TEST_CASE("a persisted synthetic corpus reloads within quantization error") {
  const fs::path dir = temp_dir() / "persist_case";
  fs::create_directories(dir);

  CorpusConfig cfg;
  cfg.n_subjects = 2;
  cfg.recording_len_s = 10.0;
  cfg.events_per_minute = 20.0;
  cfg.sample_rate_hz = 16000;
  cfg.seed = 99;
  const auto corpus = synth_corpus(cfg);

  DatasetManifest manifest;
  for (const AnnotatedRecording& rec : corpus) {
    write_wav((dir / (rec.subject_id + ".wav")).string(), rec.waveform,
              WavBitDepth::Pcm16);
    write_annotations((dir / (rec.subject_id + ".csv")).string(), rec.events);
    manifest.entries.push_back(
        {rec.subject_id + ".wav", rec.subject_id + ".csv", rec.subject_id});
  }
  write_manifest((dir / "manifest.json").string(), manifest);

  const auto loaded = load_manifest((dir / "manifest.json").string());
  REQUIRE(loaded.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(loaded[i].subject_id == corpus[i].subject_id);
    REQUIRE(loaded[i].events.size() == corpus[i].events.size());
    REQUIRE(loaded[i].waveform.samples.size() ==
            corpus[i].waveform.samples.size());
    double max_err = 0.0;
    for (std::size_t s = 0; s < corpus[i].waveform.samples.size(); ++s)
      max_err = std::max(max_err, std::abs(loaded[i].waveform.samples[s] -
                                           corpus[i].waveform.samples[s]));
    CHECK(max_err <= 1.0 / 32768.0);
  }
}

TEST_SUITE_END();
