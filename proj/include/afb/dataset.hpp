// Google-Speech-Commands-v0.02 corpus ingestion: label map, waveform loading
// with length conditioning, and deterministic split construction.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "afb/errors.hpp"

namespace afb {

inline constexpr int kNumClasses = 11;
inline constexpr int kUnknownClass = 10;
inline constexpr std::array<std::string_view, 10> kKeywords = {
    "yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go"};

/// Ordered class list: the 10 keywords, then "unknown" at index 10.
struct LabelMap {
  static int num_classes() { return kNumClasses; }
  /// Class index for a corpus word: keyword index or kUnknownClass.
  static int class_of(std::string_view word);
  static std::string_view class_name(int index);
};

/// The 35 words of the corpus, keywords first (in label order), then the 25
/// unknown-class words sorted alphabetically.
const std::vector<std::string>& corpus_words();

/// One-second unit-scaled clip.
struct Waveform {
  std::vector<double> samples;  // exactly 16000 after conditioning
  double sample_rate_hz = 16000.0;
};

inline constexpr int kClipSamples = 16000;
inline constexpr double kClipSampleRate = 16000.0;

/// Reads a PCM16 mono 16 kHz WAV, scales by 1/32768, zero-pads or truncates
/// to exactly one second. Throws FormatError for unsupported encodings
/// (including non-16 kHz rates) and ParseError for corrupt files.
Waveform load_waveform(const std::filesystem::path& path);

enum class SplitPreset {
  kSmall,  // 200 per keyword + 800 unknown per split (2,800 each)
  kLarge,  // 10x small (28,000 training examples)
  kDesk,   // 50 per keyword + 200 unknown per split; quick end-to-end runs
};

struct SplitQuota {
  int per_keyword = 0;
  int unknown_total = 0;
};

SplitQuota quota_for(SplitPreset preset);
std::string_view preset_name(SplitPreset preset);
/// Parses "small" / "large" / "desk"; throws ConfigError otherwise.
SplitPreset parse_preset(std::string_view name);

struct Example {
  std::string path;  // relative to the corpus root
  int class_index = 0;
};

struct DatasetSplits {
  std::string root;
  std::uint64_t seed = 0;
  std::vector<Example> train, validation, test;
  // [split][class] example counts; split order: train, validation, test.
  std::array<std::array<int, kNumClasses>, 3> per_class_counts{};
};

/// Samples the per-split quotas without replacement, one deterministic
/// permutation per word seeded by (seed, word). Unknown examples are drawn
/// evenly across the 25 non-keyword words (within +-1). The three splits are
/// disjoint by construction. Throws DatasetError naming any word whose
/// directory is missing or too small for its quota.
DatasetSplits build_splits(const std::filesystem::path& root, SplitPreset preset,
                           std::uint64_t seed);

/// CSV manifest with header "path,class_index,split".
void write_manifest_csv(const DatasetSplits& splits, std::ostream& out);

/// Stable digest of the manifest content; feature-cache key component.
std::uint64_t manifest_digest(const DatasetSplits& splits);

}  // namespace afb
