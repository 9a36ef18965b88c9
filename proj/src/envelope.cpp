#include "afb/envelope.hpp"

#include <cmath>
#include <string>

namespace afb {

namespace {

// Duration in ms -> exact sample count, or -1 when it is not an integer.
int exact_samples(double duration_ms, double sample_rate_hz) {
  const double samples = duration_ms * sample_rate_hz / 1000.0;
  const double rounded = std::round(samples);
  if (rounded < 1.0 || std::fabs(samples - rounded) > 1e-9 * std::max(1.0, rounded)) {
    return -1;
  }
  return static_cast<int>(rounded);
}

}  // namespace

void EnvelopeConfig::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ConfigError("envelope sample_rate_hz must be positive and finite");
  }
  if (exact_samples(window_ms, sample_rate_hz) < 0) {
    throw ConfigError("window_ms (" + std::to_string(window_ms) +
                      ") must span a positive integer number of samples");
  }
  if (exact_samples(hop_ms, sample_rate_hz) < 0) {
    throw ConfigError("hop_ms (" + std::to_string(hop_ms) +
                      ") must span a positive integer number of samples");
  }
  if (!(hop_ms <= window_ms)) {
    throw ConfigError("hop_ms (" + std::to_string(hop_ms) +
                      ") must not exceed window_ms (" + std::to_string(window_ms) + ")");
  }
}

int EnvelopeConfig::window_samples() const {
  validate();
  return exact_samples(window_ms, sample_rate_hz);
}

int EnvelopeConfig::hop_samples() const {
  validate();
  return exact_samples(hop_ms, sample_rate_hz);
}

int frame_count(std::size_t n_samples, const EnvelopeConfig& config) {
  const std::size_t window = static_cast<std::size_t>(config.window_samples());
  const std::size_t hop = static_cast<std::size_t>(config.hop_samples());
  if (n_samples < window) {
    throw ArgumentError("input of " + std::to_string(n_samples) +
                        " samples is shorter than one window (" +
                        std::to_string(window) + " samples)");
  }
  return static_cast<int>((n_samples - window) / hop) + 1;
}

std::vector<double> detect_envelope(std::span<const double> channel,
                                    const EnvelopeConfig& config) {
  const int frames = frame_count(channel.size(), config);
  const std::size_t window = static_cast<std::size_t>(config.window_samples());
  const std::size_t hop = static_cast<std::size_t>(config.hop_samples());

  std::vector<double> envelope(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    const std::size_t start = static_cast<std::size_t>(f) * hop;
    double sum_sq = 0.0;
    for (std::size_t i = start; i < start + window; ++i) {
      sum_sq += channel[i] * channel[i];
    }
    envelope[static_cast<std::size_t>(f)] = sum_sq / static_cast<double>(window);
  }
  return envelope;
}

}  // namespace afb
