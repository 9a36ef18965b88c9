#include "afb/extractor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace afb {

Spectrogram extract_spectrogram(const FilterbankDesign& fb, const EnvelopeConfig& env,
                                const Waveform& clip) {
  if (clip.sample_rate_hz != fb.config.sample_rate_hz) {
    throw ConfigError("clip sample rate " + std::to_string(clip.sample_rate_hz) +
                      " Hz does not match filterbank rate " +
                      std::to_string(fb.config.sample_rate_hz) + " Hz");
  }
  if (clip.sample_rate_hz != env.sample_rate_hz) {
    throw ConfigError("clip sample rate " + std::to_string(clip.sample_rate_hz) +
                      " Hz does not match envelope rate " +
                      std::to_string(env.sample_rate_hz) + " Hz");
  }

  const int frames = frame_count(clip.samples.size(), env);
  Spectrogram s;
  s.n_channels = static_cast<int>(fb.channels.size());
  s.n_frames = frames;
  s.values.resize(static_cast<std::size_t>(s.n_channels) * frames);
  s.channel_centers_hz = fb.centers_hz;
  s.frame_hop_ms = env.hop_ms;

  const float floor_value = static_cast<float>(std::log(kPowerFloor));
  for (int c = 0; c < s.n_channels; ++c) {
    const BiquadCoeffs& ch = fb.channels[static_cast<std::size_t>(c)];
    if (!ch.active) {
      for (int f = 0; f < frames; ++f) {
        s.at(c, f) = floor_value;
      }
      continue;
    }
    const std::vector<double> filtered = filter_signal(ch, clip.samples);
    const std::vector<double> envelope = detect_envelope(filtered, env);
    for (int f = 0; f < frames; ++f) {
      s.at(c, f) =
          static_cast<float>(std::log(envelope[static_cast<std::size_t>(f)] + kPowerFloor));
    }
  }
  return s;
}

Normalizer fit_normalizer(std::span<const Spectrogram> spectrograms) {
  if (spectrograms.empty()) {
    throw ArgumentError("cannot fit a normalizer on an empty collection");
  }
  const int channels = spectrograms.front().n_channels;
  std::size_t total_frames = 0;
  for (const Spectrogram& s : spectrograms) {
    if (s.n_channels != channels) {
      throw ArgumentError("mismatched channel counts: " + std::to_string(channels) +
                          " vs " + std::to_string(s.n_channels));
    }
    total_frames += static_cast<std::size_t>(s.n_frames);
  }
  if (total_frames == 0) {
    throw ArgumentError("cannot fit a normalizer on zero frames");
  }

  Normalizer n;
  n.mean.assign(static_cast<std::size_t>(channels), 0.0);
  n.stddev.assign(static_cast<std::size_t>(channels), 0.0);

  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (const Spectrogram& s : spectrograms) {
      for (int f = 0; f < s.n_frames; ++f) {
        sum += s.at(c, f);
      }
    }
    const double mean = sum / static_cast<double>(total_frames);
    double sq = 0.0;
    for (const Spectrogram& s : spectrograms) {
      for (int f = 0; f < s.n_frames; ++f) {
        const double d = s.at(c, f) - mean;
        sq += d * d;
      }
    }
    n.mean[static_cast<std::size_t>(c)] = mean;
    n.stddev[static_cast<std::size_t>(c)] =
        std::max(std::sqrt(sq / static_cast<double>(total_frames)), kStdFloor);
  }
  return n;
}

Spectrogram normalize(const Spectrogram& s, const Normalizer& n) {
  if (static_cast<std::size_t>(s.n_channels) != n.mean.size()) {
    throw ArgumentError("normalizer has " + std::to_string(n.mean.size()) +
                        " channels, spectrogram has " + std::to_string(s.n_channels));
  }
  Spectrogram out = s;
  for (int c = 0; c < s.n_channels; ++c) {
    const double mean = n.mean[static_cast<std::size_t>(c)];
    const double inv = 1.0 / n.stddev[static_cast<std::size_t>(c)];
    for (int f = 0; f < s.n_frames; ++f) {
      out.at(c, f) = static_cast<float>((static_cast<double>(s.at(c, f)) - mean) * inv);
    }
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'A', 'F', 'B', 'S'};
constexpr std::uint32_t kVersion = 1;

void write_u32le(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) {
    throw ParseError("truncated spectrogram header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_spectrogram(const Spectrogram& s, std::ostream& out) {
  out.write(kMagic, 4);
  write_u32le(out, kVersion);
  write_u32le(out, static_cast<std::uint32_t>(s.n_channels));
  write_u32le(out, static_cast<std::uint32_t>(s.n_frames));
  for (float v : s.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32le(out, bits);
  }
}

Spectrogram load_spectrogram(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError("bad spectrogram magic");
  }
  const std::uint32_t version = read_u32le(in);
  if (version != kVersion) {
    throw ParseError("unsupported spectrogram version " + std::to_string(version));
  }
  const std::uint32_t channels = read_u32le(in);
  const std::uint32_t frames = read_u32le(in);
  if (channels == 0 || frames == 0 ||
      static_cast<std::uint64_t>(channels) * frames > 100'000'000ULL) {
    throw ParseError("implausible spectrogram dimensions " + std::to_string(channels) +
                     "x" + std::to_string(frames));
  }
  Spectrogram s;
  s.n_channels = static_cast<int>(channels);
  s.n_frames = static_cast<int>(frames);
  s.values.resize(static_cast<std::size_t>(channels) * frames);
  for (float& v : s.values) {
    const std::uint32_t bits = read_u32le(in);
    std::memcpy(&v, &bits, 4);
  }
  return s;
}

void save_spectrogram_file(const Spectrogram& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot open '" + path.string() + "' for writing");
  }
  save_spectrogram(s, out);
}

Spectrogram load_spectrogram_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  return load_spectrogram(in);
}

}  // namespace afb
