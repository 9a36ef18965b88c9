// Minimal RIFF/WAVE reader for PCM16 mono files.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "afb/errors.hpp"

namespace afb {

struct WavPcm16 {
  std::vector<std::int16_t> samples;
  std::uint32_t sample_rate = 0;
};

/// Walks the RIFF chunks (fmt/data, skipping LIST and friends) and returns
/// the raw 16-bit mono samples. Throws ParseError on corrupt or truncated
/// structure, FormatError on compressed/stereo/non-16-bit content.
WavPcm16 read_wav_pcm16_mono(const std::filesystem::path& path);

}  // namespace afb
