#include "afb/wav.hpp"

#include <cstring>
#include <fstream>
#include <string>

namespace afb {

namespace {

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

WavPcm16 read_wav_pcm16_mono(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw ParseError("'" + name + "' is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  // Chunks start after the 12-byte RIFF header and are word-aligned.
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32le(hdr + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw ParseError("'" + name + "': chunk extends past end of file");
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw ParseError("'" + name + "': fmt chunk too small");
      }
      const unsigned char* f = bytes.data() + body;
      audio_format = read_u16le(f);
      channels = read_u16le(f + 2);
      sample_rate = read_u32le(f + 4);
      bits = read_u16le(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt || data == nullptr) {
    throw ParseError("'" + name + "': missing fmt or data chunk");
  }
  if (audio_format != 1) {
    throw FormatError("'" + name + "': only PCM is supported (format tag " +
                      std::to_string(audio_format) + ")");
  }
  if (channels != 1) {
    throw FormatError("'" + name + "': only mono is supported (" +
                      std::to_string(channels) + " channels)");
  }
  if (bits != 16) {
    throw FormatError("'" + name + "': only 16-bit samples are supported (" +
                      std::to_string(bits) + " bits)");
  }

  WavPcm16 out;
  out.sample_rate = sample_rate;
  out.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const std::uint16_t u = read_u16le(data + 2 * i);
    out.samples[i] = static_cast<std::int16_t>(u);
  }
  return out;
}

}  // namespace afb
