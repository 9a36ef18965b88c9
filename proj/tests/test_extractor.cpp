#include "afb/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "afb/rng.hpp"
#include "doctest.h"

using namespace afb;

namespace {

Waveform tone_clip(double f_hz, double amplitude) {
  Waveform w;
  w.samples.resize(kClipSamples);
  for (int i = 0; i < kClipSamples; ++i) {
    w.samples[static_cast<std::size_t>(i)] =
        amplitude * std::sin(2.0 * std::numbers::pi * f_hz * i / kClipSampleRate);
  }
  return w;
}

Spectrogram constant_spectrogram(int channels, int frames, float value) {
  Spectrogram s;
  s.n_channels = channels;
  s.n_frames = frames;
  s.values.assign(static_cast<std::size_t>(channels) * frames, value);
  return s;
}

}  // namespace

TEST_CASE("typical configuration yields a 24 x 99 spectrogram") {
  const FilterbankDesign fb = make_filterbank(typical_config());
  const EnvelopeConfig env;
  const Spectrogram s = extract_spectrogram(fb, env, tone_clip(440.0, 0.5));
  CHECK(s.n_channels == 24);
  CHECK(s.n_frames == 99);
  CHECK(s.channel_centers_hz.size() == 24);
  CHECK(s.frame_hop_ms == 10.0);
  for (float v : s.values) {
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("a 20 kHz top frequency leaves exactly the five top channels inactive") {
  FilterbankConfig cfg = typical_config();
  cfg.f_max_hz = 20000.0;
  const FilterbankDesign fb = make_filterbank(cfg);
  const EnvelopeConfig env;
  const Spectrogram s = extract_spectrogram(fb, env, tone_clip(440.0, 0.5));

  const float floor_value = static_cast<float>(std::log(kPowerFloor));
  int inactive = 0;
  for (int c = 0; c < s.n_channels; ++c) {
    bool all_floor = true;
    for (int f = 0; f < s.n_frames; ++f) {
      all_floor = all_floor && s.at(c, f) == floor_value;
    }
    if (!fb.channels[static_cast<std::size_t>(c)].active) {
      ++inactive;
      CHECK(all_floor);
    }
  }
  CHECK(inactive == 5);
  for (int c = 19; c < 24; ++c) {
    CHECK_FALSE(fb.channels[static_cast<std::size_t>(c)].active);
  }
  CHECK(fb.channels[18].active);
}

TEST_CASE("an all-zero clip bottoms out at the log floor") {
  const FilterbankDesign fb = make_filterbank(typical_config());
  const EnvelopeConfig env;
  Waveform silence;
  silence.samples.assign(kClipSamples, 0.0);
  const Spectrogram s = extract_spectrogram(fb, env, silence);
  const float floor_value = static_cast<float>(std::log(kPowerFloor));
  for (float v : s.values) {
    CHECK(v == floor_value);
  }
}

TEST_CASE("extraction is bit-deterministic") {
  const FilterbankDesign fb = make_filterbank(typical_config());
  const EnvelopeConfig env;
  const Waveform clip = tone_clip(700.0, 0.4);
  const Spectrogram a = extract_spectrogram(fb, env, clip);
  const Spectrogram b = extract_spectrogram(fb, env, clip);
  CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) ==
        0);
}

TEST_CASE("louder clips raise every feature above the floor") {
  const FilterbankDesign fb = make_filterbank(typical_config());
  const EnvelopeConfig env;
  const Spectrogram quiet = extract_spectrogram(fb, env, tone_clip(800.0, 0.2));
  const Spectrogram loud = extract_spectrogram(fb, env, tone_clip(800.0, 0.4));
  const float floor_value = static_cast<float>(std::log(kPowerFloor));
  REQUIRE(quiet.values.size() == loud.values.size());
  for (std::size_t i = 0; i < quiet.values.size(); ++i) {
    if (quiet.values[i] > floor_value + 1e-3f) {
      CHECK(loud.values[i] > quiet.values[i]);
    }
  }
}

TEST_CASE("a tone at a channel center peaks on that channel's row") {
  const FilterbankDesign fb = make_filterbank(typical_config());
  const EnvelopeConfig env;
  for (int k : {5, 12, 18}) {
    const Spectrogram s =
        extract_spectrogram(fb, env, tone_clip(fb.centers_hz[static_cast<std::size_t>(k)], 0.5));
    int best = 0;
    double best_mean = -1e30;
    for (int c = 0; c < s.n_channels; ++c) {
      double mean = 0.0;
      for (int f = 0; f < s.n_frames; ++f) {
        mean += s.at(c, f);
      }
      if (mean > best_mean) {
        best_mean = mean;
        best = c;
      }
    }
    CHECK(best == k);
  }
}

TEST_CASE("sample-rate mismatches and short clips are rejected") {
  const FilterbankDesign fb = make_filterbank(typical_config());
  const EnvelopeConfig env;
  Waveform wrong_rate = tone_clip(500.0, 0.3);
  wrong_rate.sample_rate_hz = 8000.0;
  CHECK_THROWS_AS(extract_spectrogram(fb, env, wrong_rate), ConfigError);

  Waveform short_clip;
  short_clip.samples.assign(100, 0.0);
  CHECK_THROWS_AS(extract_spectrogram(fb, env, short_clip), ArgumentError);
}

TEST_CASE("normalizer statistics match hand arithmetic") {
  // Two spectrograms whose single channel holds {0} and {2}: mean 1, std 1.
  const Spectrogram zeros = constant_spectrogram(1, 1, 0.0f);
  const Spectrogram twos = constant_spectrogram(1, 1, 2.0f);
  const Spectrogram pair[] = {zeros, twos};
  const Normalizer n = fit_normalizer(pair);
  CHECK(n.mean[0] == doctest::Approx(1.0));
  CHECK(n.stddev[0] == doctest::Approx(1.0));
}

TEST_CASE("a constant collection clamps the deviation to the floor") {
  const Spectrogram c = constant_spectrogram(3, 4, 2.5f);
  const Spectrogram one[] = {c};
  const Normalizer n = fit_normalizer(one);
  for (double m : n.mean) {
    CHECK(m == doctest::Approx(2.5));
  }
  for (double s : n.stddev) {
    CHECK(s == kStdFloor);
  }
  // Zero-variance channels normalize to zero.
  const Spectrogram z = normalize(c, n);
  for (float v : z.values) {
    CHECK(v == 0.0f);
  }
}

TEST_CASE("fit rejects empty and mismatched collections") {
  CHECK_THROWS_AS(fit_normalizer({}), ArgumentError);
  const Spectrogram a = constant_spectrogram(2, 3, 1.0f);
  const Spectrogram b = constant_spectrogram(3, 3, 1.0f);
  const Spectrogram mixed[] = {a, b};
  CHECK_THROWS_AS(fit_normalizer(mixed), ArgumentError);
  CHECK_THROWS_AS(normalize(a, fit_normalizer(std::span(&b, 1))), ArgumentError);
}

TEST_CASE("normalize standardizes the population it was fit on") {
  Spectrogram s = constant_spectrogram(2, 50, 0.0f);
  SplitMix64 rng(5);
  for (float& v : s.values) {
    v = static_cast<float>(rng.uniform(-3.0, 3.0));
  }
  const Spectrogram fit_input[] = {s};
  const Normalizer n = fit_normalizer(fit_input);
  const Spectrogram z = normalize(s, n);
  for (int c = 0; c < z.n_channels; ++c) {
    double mean = 0.0, sq = 0.0;
    for (int f = 0; f < z.n_frames; ++f) {
      mean += z.at(c, f);
    }
    mean /= z.n_frames;
    for (int f = 0; f < z.n_frames; ++f) {
      sq += (z.at(c, f) - mean) * (z.at(c, f) - mean);
    }
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(std::sqrt(sq / z.n_frames) == doctest::Approx(1.0).epsilon(1e-5));
  }
  // Plain arithmetic: value 5 under mean 1, std 2 -> 2.
  Normalizer plain;
  plain.mean = {1.0, 1.0};
  plain.stddev = {2.0, 2.0};
  const Spectrogram fives = constant_spectrogram(2, 1, 5.0f);
  CHECK(normalize(fives, plain).at(0, 0) == 2.0f);
}

TEST_CASE("normalizer fitting does not depend on collection order") {
  SplitMix64 rng(17);
  std::vector<Spectrogram> specs;
  for (int i = 0; i < 6; ++i) {
    Spectrogram s = constant_spectrogram(4, 30, 0.0f);
    for (float& v : s.values) {
      v = static_cast<float>(rng.uniform(-8.0, 2.0));
    }
    specs.push_back(std::move(s));
  }
  const Normalizer forward_fit = fit_normalizer(specs);
  std::reverse(specs.begin(), specs.end());
  const Normalizer reverse_fit = fit_normalizer(specs);
  for (std::size_t c = 0; c < forward_fit.mean.size(); ++c) {
    CHECK(reverse_fit.mean[c] ==
          doctest::Approx(forward_fit.mean[c]).epsilon(1e-12));
    CHECK(reverse_fit.stddev[c] ==
          doctest::Approx(forward_fit.stddev[c]).epsilon(1e-12));
  }
}

TEST_CASE("spectrogram container round-trips bit-exactly") {
  const FilterbankDesign fb = make_filterbank(tiny_config());
  const EnvelopeConfig env;
  const Spectrogram s = extract_spectrogram(fb, env, tone_clip(440.0, 0.5));

  std::stringstream buf;
  save_spectrogram(s, buf);
  const Spectrogram loaded = load_spectrogram(buf);
  CHECK(loaded.n_channels == s.n_channels);
  CHECK(loaded.n_frames == s.n_frames);
  CHECK(std::memcmp(loaded.values.data(), s.values.data(),
                    s.values.size() * sizeof(float)) == 0);
}

TEST_CASE("corrupt spectrogram containers are parse errors") {
  std::stringstream bad_magic("XXXX0000000000000000");
  CHECK_THROWS_AS(load_spectrogram(bad_magic), ParseError);

  const Spectrogram s = constant_spectrogram(2, 2, 1.0f);
  std::stringstream buf;
  save_spectrogram(s, buf);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 3);  // truncate payload
  std::stringstream truncated(bytes);
  CHECK_THROWS_AS(load_spectrogram(truncated), ParseError);
}
