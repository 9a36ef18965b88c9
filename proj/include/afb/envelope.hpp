// Short-time average-power envelope of a filter channel: sliding rectangular
// window, mean of squared samples per frame, no padding.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "afb/errors.hpp"

namespace afb {

struct EnvelopeConfig {
  double window_ms = 20.0;
  double hop_ms = 10.0;
  double sample_rate_hz = 16000.0;

  /// Window/hop as exact sample counts. Throws ConfigError when a duration
  /// does not land on an integer number of samples, or hop > window.
  void validate() const;
  int window_samples() const;
  int hop_samples() const;
};

/// floor((n - W)/H) + 1; trailing samples that do not fill a window are
/// dropped. Throws ArgumentError when the input is shorter than one window.
int frame_count(std::size_t n_samples, const EnvelopeConfig& config);

/// Mean of squared samples per frame.
std::vector<double> detect_envelope(std::span<const double> channel,
                                    const EnvelopeConfig& config);

}  // namespace afb
