#include "afb/envelope.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "afb/rng.hpp"
#include "doctest.h"

using namespace afb;

namespace {

// Independent brute-force oracle: mean square per frame, written directly
// from the framing definition.
std::vector<double> envelope_oracle(const std::vector<double>& x, int window, int hop) {
  std::vector<double> out;
  for (std::size_t start = 0; start + window <= x.size();
       start += static_cast<std::size_t>(hop)) {
    double acc = 0.0;
    for (int i = 0; i < window; ++i) {
      acc += x[start + static_cast<std::size_t>(i)] * x[start + static_cast<std::size_t>(i)];
    }
    out.push_back(acc / window);
  }
  return out;
}

}  // namespace

TEST_CASE("frame counts follow the no-padding formula") {
  EnvelopeConfig cfg;  // 20 ms / 10 ms at 16 kHz -> W=320, H=160
  CHECK(cfg.window_samples() == 320);
  CHECK(cfg.hop_samples() == 160);
  CHECK(frame_count(16000, cfg) == 99);
  CHECK(frame_count(320, cfg) == 1);
  CHECK_THROWS_AS(frame_count(319, cfg), ArgumentError);
}

TEST_CASE("invalid envelope configurations are rejected") {
  EnvelopeConfig cfg;
  cfg.hop_ms = 25.0;  // hop > window
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = EnvelopeConfig{};
  cfg.window_ms = 0.05;  // 0.8 samples at 16 kHz
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("zero input gives an all-zero envelope") {
  EnvelopeConfig cfg;
  const std::vector<double> zeros(16000, 0.0);
  for (double v : detect_envelope(zeros, cfg)) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("sinusoid envelope equals half the squared amplitude") {
  EnvelopeConfig cfg;
  const double amplitude = 0.5;
  std::vector<double> tone(16000);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone[i] = amplitude * std::sin(2.0 * std::numbers::pi * 1000.0 *
                                   static_cast<double>(i) / 16000.0);
  }
  const std::vector<double> env = detect_envelope(tone, cfg);
  REQUIRE(env.size() == 99);
  for (double v : env) {
    CHECK(v == doctest::Approx(amplitude * amplitude / 2.0).epsilon(0.02));
  }
}

TEST_CASE("a tone burst produces a monotone power transition") {
  // Silence for the first half, a unit-amplitude 1 kHz tone for the second:
  // power climbs from 0 to 0.5 as windows slide over the onset.
  EnvelopeConfig cfg;
  std::vector<double> burst(16000, 0.0);
  for (std::size_t i = 8000; i < burst.size(); ++i) {
    burst[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 16000.0);
  }
  const std::vector<double> env = detect_envelope(burst, cfg);
  const std::vector<double> expected = envelope_oracle(burst, 320, 160);
  REQUIRE(env.size() == expected.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    CHECK(env[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  CHECK(env.front() == 0.0);
  CHECK(env.back() == doctest::Approx(0.5).epsilon(1e-9));
  for (std::size_t i = 1; i < env.size(); ++i) {
    CHECK(env[i] >= env[i - 1] - 1e-12);
  }
}

TEST_CASE("envelope values are non-negative and scale quadratically") {
  EnvelopeConfig cfg;
  SplitMix64 rng(99);
  std::vector<double> x(3200);
  for (double& v : x) {
    v = rng.uniform(-1.0, 1.0);
  }
  const std::vector<double> base = detect_envelope(x, cfg);
  for (double v : base) {
    CHECK(v >= 0.0);
  }
  const double alpha = 0.37;
  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    scaled[i] = alpha * x[i];
  }
  const std::vector<double> out = detect_envelope(scaled, cfg);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i] == doctest::Approx(alpha * alpha * base[i]).epsilon(1e-9));
  }
}

TEST_CASE("periodic input with window-aligned period gives a constant envelope") {
  EnvelopeConfig cfg;
  SplitMix64 rng(3);
  std::vector<double> period(160);
  for (double& v : period) {
    v = rng.uniform(-1.0, 1.0);
  }
  std::vector<double> x;
  for (int rep = 0; rep < 40; ++rep) {
    x.insert(x.end(), period.begin(), period.end());
  }
  const std::vector<double> env = detect_envelope(x, cfg);
  for (double v : env) {
    CHECK(v == doctest::Approx(env.front()).epsilon(1e-12));
  }
}
