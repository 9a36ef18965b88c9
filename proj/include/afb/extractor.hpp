// Full feature-extractor model: filterbank channels through envelope
// detectors, log-compressed into a channels-x-frames spectrogram, plus the
// per-channel standardization fitted on training features.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "afb/dataset.hpp"
#include "afb/envelope.hpp"
#include "afb/filterbank.hpp"

namespace afb {

/// Additive floor under the average power before the log, so all features are
/// finite on unit-scaled audio.
inline constexpr double kPowerFloor = 1e-8;

struct Spectrogram {
  int n_channels = 0;
  int n_frames = 0;
  std::vector<float> values;  // row-major [channel][frame]
  std::vector<double> channel_centers_hz;
  double frame_hop_ms = 0.0;

  float at(int channel, int frame) const {
    return values[static_cast<std::size_t>(channel) * n_frames + frame];
  }
  float& at(int channel, int frame) {
    return values[static_cast<std::size_t>(channel) * n_frames + frame];
  }
};

/// Per-channel mean and standard deviation of log features over a training
/// set. Standard deviations are clamped to >= 1e-6.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;
};

inline constexpr double kStdFloor = 1e-6;

/// Row k = log(envelope of channel k + floor); inactive channels produce the
/// constant log(floor) row. The clip sample rate must match both configs.
Spectrogram extract_spectrogram(const FilterbankDesign& fb, const EnvelopeConfig& env,
                                const Waveform& clip);

/// Two-pass per-channel mean/std over all frames of all spectrograms, so the
/// result does not depend on input ordering. Throws ArgumentError on an empty
/// collection or mismatched channel counts.
Normalizer fit_normalizer(std::span<const Spectrogram> spectrograms);

/// (value - mean) / std per channel.
Spectrogram normalize(const Spectrogram& s, const Normalizer& n);

// Flat binary container: magic "AFBS", u32 version, u32 n_channels,
// u32 n_frames (little-endian), then row-major 32-bit floats.
void save_spectrogram(const Spectrogram& s, std::ostream& out);
Spectrogram load_spectrogram(std::istream& in);
void save_spectrogram_file(const Spectrogram& s, const std::filesystem::path& path);
Spectrogram load_spectrogram_file(const std::filesystem::path& path);

}  // namespace afb
