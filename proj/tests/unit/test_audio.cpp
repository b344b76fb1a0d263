/* Copyright 2026 The SpecNet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "specnet/audio/feature_cache.hpp"
#include "specnet/audio/mel.hpp"
#include "specnet/audio/normalizer.hpp"
#include "specnet/audio/resample.hpp"
#include "specnet/audio/wav.hpp"
#include "specnet/util/io.hpp"
#include "test_util.hpp"

using namespace specnet;

namespace {

PcmSignal sine(int rate, std::size_t n, double freq, double amplitude = 0.5) {
  PcmSignal s;
  s.sample_rate = rate;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.samples[i] = float(amplitude * std::sin(2.0 * std::numbers::pi * freq * double(i) / rate));
  }
  return s;
}

PcmSignal noise(int rate, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  PcmSignal s;
  s.sample_rate = rate;
  s.samples.resize(n);
  for (auto& v : s.samples) v = u(rng);
  return s;
}

// Single DFT coefficient magnitude at an integer frequency in Hz.
double dft_magnitude(const std::vector<float>& x, int rate, double hz) {
  std::complex<double> acc = 0.0;
  const double w = -2.0 * std::numbers::pi * hz / rate;
  for (std::size_t i = 0; i < x.size(); ++i) acc += double(x[i]) * std::polar(1.0, w * double(i));
  return std::abs(acc);
}

Spectrogram make_spec(std::size_t frames, std::size_t mels, std::vector<float> data) {
  Spectrogram s;
  s.n_frames = frames;
  s.n_mels = mels;
  s.data = std::move(data);
  return s;
}

DecodeError::Kind decode_kind(const std::vector<char>& bytes) {
  try {
    decode_wav_bytes(bytes);
  } catch (const DecodeError& e) {
    return e.kind();
  }
  FAIL("decode unexpectedly succeeded");
  return DecodeError::Kind::kMalformed;
}

}  // namespace

TEST_CASE("decode_wav scales 16-bit integers") {
  // Hand-built header so the encoder under test is not its own oracle.
  ByteWriter w;
  w.raw("RIFF");
  w.u32(36 + 6);
  w.raw("WAVE");
  w.raw("fmt ");
  w.u32(16);
  w.u16(1);
  w.u16(1);
  w.u32(8000);
  w.u32(16000);
  w.u16(2);
  w.u16(16);
  w.raw("data");
  w.u32(6);
  for (std::int16_t v : {std::int16_t(0), std::int16_t(16384), std::int16_t(-16384)}) w.u16(std::uint16_t(v));
  const PcmSignal s = decode_wav_bytes(w.bytes());
  CHECK(s.sample_rate == 8000);
  REQUIRE(s.samples.size() == 3);
  CHECK(s.samples[0] == 0.0f);
  CHECK(s.samples[1] == doctest::Approx(0.5));
  CHECK(s.samples[2] == doctest::Approx(-0.5));
}

TEST_CASE("decode_wav averages stereo to mono") {
  const auto bytes = encode_wav({{1.0f}, {0.0f}}, 16000, WavEncoding::kFloat32);
  const PcmSignal s = decode_wav_bytes(bytes);
  REQUIRE(s.samples.size() == 1);
  CHECK(s.samples[0] == doctest::Approx(0.5));
}

TEST_CASE("decode_wav reports each failure distinctly") {
  const auto good = encode_wav({{0.1f, 0.2f, 0.3f}}, 8000, WavEncoding::kPcm16);
  CHECK(decode_kind(std::vector<char>(good.begin(), good.begin() + 20)) == DecodeError::Kind::kMalformed);
  CHECK(decode_kind(std::vector<char>(good.begin(), good.begin() + 44 - 2)) != DecodeError::Kind::kUnreadable);

  auto not_riff = good;
  not_riff[0] = 'X';
  CHECK(decode_kind(not_riff) == DecodeError::Kind::kMalformed);

  auto adpcm = good;
  adpcm[20] = 2;  // format tag
  CHECK(decode_kind(adpcm) == DecodeError::Kind::kUnsupportedEncoding);

  auto six_channels = good;
  six_channels[22] = 6;
  CHECK(decode_kind(six_channels) == DecodeError::Kind::kUnsupportedEncoding);

  const auto empty = encode_wav({{}}, 8000, WavEncoding::kPcm16);
  CHECK(decode_kind(empty) == DecodeError::Kind::kEmptyPayload);

  try {
    decode_wav("/nonexistent/specnet.wav");
    FAIL("expected an error");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::kUnreadable);
  }
}

TEST_CASE("wav file roundtrip through disk") {
  const auto dir = test::scratch_dir("wav");
  const PcmSignal s = sine(16000, 400, 300.0);
  write_wav(dir / "a.wav", s, WavEncoding::kFloat32);
  const PcmSignal back = decode_wav(dir / "a.wav");
  CHECK(back.sample_rate == 16000);
  CHECK(back.samples == s.samples);
}

TEST_CASE("resample lengths and identity") {
  const PcmSignal s = sine(44100, 88200, 440.0);
  const PcmSignal half = resample(s, 22050);
  CHECK(half.sample_rate == 22050);
  CHECK(half.samples.size() == 44100);
  CHECK(resample(s, 44100).samples == s.samples);
  for (int target : {8000, 16000, 22050, 48000}) {
    const PcmSignal r = resample(noise(16000, 12345, 1), target);
    CHECK(std::abs(r.duration_seconds() - 12345.0 / 16000) <= 1.0 / target);
  }
}

TEST_CASE("resample keeps a 440 Hz sine at 440 Hz") {
  const PcmSignal out = resample(sine(44100, 44100, 440.0, 0.5), 22050);
  REQUIRE(out.samples.size() == 22050);
  // One second of output: DFT bins fall on whole hertz.
  double best = 0.0;
  int best_hz = 0;
  for (int hz = 1; hz < 2000; ++hz) {
    const double m = dft_magnitude(out.samples, 22050, hz);
    if (m > best) {
      best = m;
      best_hz = hz;
    }
  }
  CHECK(best_hz == 440);
  const double amplitude = 2.0 * best / double(out.samples.size());
  CHECK(std::abs(amplitude - 0.5) / 0.5 < 0.01);
}

TEST_CASE("frame counts follow floor((len - frame)/hop) + 1") {
  const FeatureConfig cfg;
  CHECK(extract_mel_spectrogram(noise(22050, 88200, 2), cfg).n_frames == 171);
  const Spectrogram one = extract_mel_spectrogram(noise(22050, 22050, 3), cfg);
  CHECK(one.n_frames == 42);
  CHECK(one.n_mels == 64);
  CHECK_FALSE(one.normalized);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1024 + rng() % 30000;
    const Spectrogram s = extract_mel_spectrogram(noise(22050, n, trial), cfg);
    CHECK(s.n_frames == (n - 1024) / 512 + 1);
    CHECK(expected_frame_count(n, cfg) == s.n_frames);
  }
  // Shorter clips are padded up to one frame.
  CHECK(extract_mel_spectrogram(noise(22050, 100, 5), cfg).n_frames == 1);
}

TEST_CASE("mel spectrogram properties") {
  const FeatureConfig cfg;
  const PcmSignal zero{std::vector<float>(5000, 0.0f), 22050};
  for (float v : extract_mel_spectrogram(zero, cfg).data) CHECK(v == 0.0f);

  const PcmSignal x = noise(22050, 9000, 6);
  const Spectrogram a = extract_mel_spectrogram(x, cfg);
  const Spectrogram b = extract_mel_spectrogram(x, cfg);
  CHECK(a.data == b.data);

  PcmSignal scaled = x;
  const float gain = 0.37f;
  for (auto& v : scaled.samples) v *= gain;
  const Spectrogram c = extract_mel_spectrogram(scaled, cfg);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double want = double(a.data[i]) * double(gain) * double(gain);
    CHECK(std::abs(double(c.data[i]) - want) <= 1e-6 * std::max(want, 1e-12) + 1e-12);
  }

  CHECK_THROWS(extract_mel_spectrogram(PcmSignal{{}, 22050}, cfg));
  CHECK_THROWS(extract_mel_spectrogram(noise(16000, 4000, 1), cfg));
}

TEST_CASE("log compression applies log10(x + eps)") {
  FeatureConfig lin;
  FeatureConfig log = lin;
  log.log_compress = true;
  const PcmSignal x = noise(22050, 4096, 8);
  const Spectrogram a = extract_mel_spectrogram(x, lin), b = extract_mel_spectrogram(x, log);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    CHECK(b.data[i] == doctest::Approx(std::log10(double(a.data[i]) + lin.epsilon)).epsilon(1e-5));
  }
}

TEST_CASE("mel filterbank shape") {
  const MelFilterbank fb(64, 1024, 22050, 0.0, 11025.0);
  CHECK(fb.n_bins() == 513);
  const auto& edges = fb.edges_hz();
  REQUIRE(edges.size() == 66);
  for (std::size_t m = 0; m < 64; ++m) {
    double peak = 0.0;
    for (std::size_t k = 0; k < fb.n_bins(); ++k) {
      const double w = fb.weight(m, k);
      CHECK(w >= 0.0);
      const double hz = double(k) * 22050 / 1024;
      // Support lies strictly between the filter's outer edges.
      if (hz <= edges[m] || hz >= edges[m + 2]) CHECK(w == 0.0);
      peak = std::max(peak, w);
    }
    CHECK(peak <= 1.0);
    // Equal spacing on the mel scale: neighbours share half their support.
    const double lo = MelFilterbank::hz_to_mel(edges[m]), mid = MelFilterbank::hz_to_mel(edges[m + 1]);
    const double hi = MelFilterbank::hz_to_mel(edges[m + 2]);
    CHECK(mid - lo == doctest::Approx(hi - mid));
  }
  for (std::size_t k = 0; k < fb.n_bins(); ++k) {
    const double hz = double(k) * 22050 / 1024;
    if (hz <= 0.0 || hz >= 11025.0) continue;
    double best = 0.0;
    for (std::size_t m = 0; m < 64; ++m) best = std::max(best, fb.weight(m, k));
    CHECK(best > 0.0);
  }
  CHECK(MelFilterbank::hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  CHECK(MelFilterbank::mel_to_hz(MelFilterbank::hz_to_mel(1234.5)) == doctest::Approx(1234.5));
}

TEST_CASE("a triangle peaks at its centre frequency") {
  // Place a centre exactly on an FFT bin by choosing the band edges.
  const MelFilterbank fb(1, 1024, 22050, 0.0, 2.0 * 22050.0 / 1024 * 10);
  const double centre = fb.edges_hz()[1];
  const double bin = centre * 1024 / 22050;
  if (std::abs(bin - std::round(bin)) < 1e-9) CHECK(fb.weight(0, std::size_t(std::round(bin))) == doctest::Approx(1.0));
}

TEST_CASE("fit_normalizer statistics") {
  const Normalizer constant = fit_normalizer(std::vector<Spectrogram>{make_spec(3, 2, std::vector<float>(6, 4.0f))}, 1e-8);
  CHECK(constant.mean == std::vector<double>{4.0, 4.0});
  CHECK(constant.variance == std::vector<double>{0.0, 0.0});

  const Normalizer two = fit_normalizer(std::vector<Spectrogram>{make_spec(2, 1, {0.0f, 2.0f})}, 1e-8);
  CHECK(two.mean[0] == 1.0);
  CHECK(two.variance[0] == 1.0);

  // Independent two-pass statistics over the concatenated frames.
  std::mt19937_64 rng(10);
  std::vector<Spectrogram> specs;
  for (int i = 0; i < 5; ++i) {
    const std::size_t frames = 3 + rng() % 20;
    std::vector<float> data(frames * 8);
    std::normal_distribution<float> nd(3.0f, 2.0f);
    for (auto& v : data) v = nd(rng);
    specs.push_back(make_spec(frames, 8, data));
  }
  const Normalizer fitted = fit_normalizer(specs, 1e-8);
  for (std::size_t m = 0; m < 8; ++m) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : specs)
      for (std::size_t t = 0; t < s.n_frames; ++t) {
        sum += s.at(t, m);
        ++n;
      }
    const double mean = sum / double(n);
    double sq = 0.0;
    for (const auto& s : specs)
      for (std::size_t t = 0; t < s.n_frames; ++t) sq += (s.at(t, m) - mean) * (s.at(t, m) - mean);
    CHECK(std::abs(fitted.mean[m] - mean) < 1e-10);
    CHECK(std::abs(fitted.variance[m] - sq / double(n)) < 1e-10);
  }

  CHECK_THROWS(fit_normalizer(std::vector<Spectrogram>{}, 1e-8));
  CHECK_THROWS(fit_normalizer(std::vector<Spectrogram>{make_spec(1, 2, {1, 2}), make_spec(1, 3, {1, 2, 3})}, 1e-8));
}

TEST_CASE("apply_normalizer") {
  const Spectrogram constant = make_spec(4, 2, std::vector<float>(8, 2.5f));
  const Normalizer own = fit_normalizer(std::vector<Spectrogram>{constant}, 1e-8);
  const Spectrogram zeros = apply_normalizer(own, constant);
  CHECK(zeros.normalized);
  for (float v : zeros.data) CHECK(v == 0.0f);

  const Spectrogram x = make_spec(2, 2, {1.5f, -2.0f, 0.25f, 7.0f});
  const Normalizer identity{{0.0, 0.0}, {1.0, 1.0}, 0.0};
  CHECK(apply_normalizer(identity, x).data == x.data);

  const Normalizer n3{{1.0}, {4.0}, 1e-8};
  CHECK(apply_normalizer(n3, make_spec(1, 1, {3.0f})).data[0] == doctest::Approx(0.5));

  Normalizer stddev = n3;
  stddev.kind = NormalizationKind::kStdDev;
  CHECK(apply_normalizer(stddev, make_spec(1, 1, {3.0f})).data[0] == doctest::Approx(1.0));

  CHECK_THROWS(apply_normalizer(n3, apply_normalizer(n3, make_spec(1, 1, {3.0f}))));
  CHECK_THROWS(apply_normalizer(identity, make_spec(1, 1, {3.0f})));
}

TEST_CASE("normalization inverts") {
  std::mt19937_64 rng(14);
  std::vector<float> data(40 * 16);
  std::uniform_real_distribution<float> u(0.0f, 10.0f);
  for (auto& v : data) v = u(rng);
  const Spectrogram x = make_spec(40, 16, data);
  for (auto kind : {NormalizationKind::kVariance, NormalizationKind::kStdDev}) {
    const Normalizer n = fit_normalizer(std::vector<Spectrogram>{x}, 1e-8, kind);
    const Spectrogram back = denormalize(n, apply_normalizer(n, x));
    CHECK_FALSE(back.normalized);
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(std::abs(back.data[i] - data[i]) <= 1e-6 * std::max(1.0f, data[i]));
  }
}

TEST_CASE("normalizer JSON") {
  const Normalizer n{{1.0, 2.5}, {0.5, 3.0}, 1e-8};
  const auto j = nlohmann::json::parse(n.to_json());
  CHECK(j.at("mean") == nlohmann::json({1.0, 2.5}));
  CHECK(j.at("variance") == nlohmann::json({0.5, 3.0}));
  CHECK(j.at("epsilon").get<double>() == 1e-8);
  const Normalizer back = Normalizer::from_json(n.to_json());
  CHECK(back.mean == n.mean);
  CHECK(back.variance == n.variance);
  CHECK(back.epsilon == n.epsilon);
}

TEST_CASE("feature cache format") {
  std::mt19937_64 rng(15);
  std::vector<float> data(171 * 64);
  std::normal_distribution<float> nd;
  for (auto& v : data) v = nd(rng);
  data[3] = -0.0f;
  const Spectrogram s = make_spec(171, 64, data);
  const auto dir = test::scratch_dir("cache");
  write_feature_cache(s, dir / "a.melf");
  const Spectrogram back = read_feature_cache(dir / "a.melf");
  CHECK(back.n_frames == 171);
  CHECK(back.n_mels == 64);
  CHECK(std::memcmp(back.data.data(), s.data.data(), data.size() * sizeof(float)) == 0);

  const auto bytes = encode_feature_cache(make_spec(42, 64, std::vector<float>(42 * 64, 1.0f)));
  CHECK(bytes.size() == 16 + 42 * 64 * 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "MELF");
  CHECK(bytes[4] == 1);

  auto expect_kind = [](std::vector<char> b, FeatureCacheError::Kind kind) {
    try {
      decode_feature_cache(b);
      FAIL("expected an error");
    } catch (const FeatureCacheError& e) {
      CHECK(e.kind() == kind);
    }
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  expect_kind(bad_magic, FeatureCacheError::Kind::kBadMagic);
  auto bad_version = bytes;
  bad_version[4] = 2;
  expect_kind(bad_version, FeatureCacheError::Kind::kVersionMismatch);
  expect_kind(std::vector<char>(bytes.begin(), bytes.end() - 1), FeatureCacheError::Kind::kTruncated);
  expect_kind(std::vector<char>(bytes.begin(), bytes.begin() + 10), FeatureCacheError::Kind::kTruncated);
  try {
    read_feature_cache(dir / "missing.melf");
    FAIL("expected an error");
  } catch (const FeatureCacheError& e) {
    CHECK(e.kind() == FeatureCacheError::Kind::kUnreadable);
  }
}

TEST_CASE("fit_to_duration pads and trims at the end") {
  PcmSignal s{{1, 2, 3}, 2};
  CHECK(fit_to_duration(s, 2.5).samples == std::vector<float>{1, 2, 3, 0, 0});
  CHECK(fit_to_duration(s, 1.0).samples == std::vector<float>{1, 2});
}
