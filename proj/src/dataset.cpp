#include "afb/dataset.hpp"

#include <algorithm>
#include <ostream>

#include "afb/rng.hpp"
#include "afb/wav.hpp"

namespace afb {

namespace fs = std::filesystem;

int LabelMap::class_of(std::string_view word) {
  for (std::size_t i = 0; i < kKeywords.size(); ++i) {
    if (kKeywords[i] == word) {
      return static_cast<int>(i);
    }
  }
  return kUnknownClass;
}

std::string_view LabelMap::class_name(int index) {
  if (index < 0 || index >= kNumClasses) {
    throw ArgumentError("class index " + std::to_string(index) + " out of range");
  }
  if (index == kUnknownClass) {
    return "unknown";
  }
  return kKeywords[static_cast<std::size_t>(index)];
}

const std::vector<std::string>& corpus_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w(kKeywords.begin(), kKeywords.end());
    const std::vector<std::string> unknown = {
        "backward", "bed",    "bird",  "cat",   "dog",    "eight", "five",
        "follow",   "forward", "four",  "happy", "house",  "learn", "marvin",
        "nine",     "one",    "seven", "sheila", "six",    "three", "tree",
        "two",      "visual", "wow",   "zero"};
    w.insert(w.end(), unknown.begin(), unknown.end());
    return w;
  }();
  return words;
}

Waveform load_waveform(const fs::path& path) {
  WavPcm16 raw = read_wav_pcm16_mono(path);
  if (raw.sample_rate != static_cast<std::uint32_t>(kClipSampleRate)) {
    throw FormatError("'" + path.string() + "': sample rate " +
                      std::to_string(raw.sample_rate) + " Hz, expected 16000");
  }
  Waveform wave;
  wave.sample_rate_hz = kClipSampleRate;
  wave.samples.assign(kClipSamples, 0.0);
  const std::size_t n = std::min<std::size_t>(raw.samples.size(), kClipSamples);
  for (std::size_t i = 0; i < n; ++i) {
    wave.samples[i] = static_cast<double>(raw.samples[i]) / 32768.0;
  }
  return wave;
}

SplitQuota quota_for(SplitPreset preset) {
  switch (preset) {
    case SplitPreset::kSmall:
      return {200, 800};
    case SplitPreset::kLarge:
      return {2000, 8000};
    case SplitPreset::kDesk:
      return {50, 200};
  }
  throw ArgumentError("unknown split preset");
}

std::string_view preset_name(SplitPreset preset) {
  switch (preset) {
    case SplitPreset::kSmall:
      return "small";
    case SplitPreset::kLarge:
      return "large";
    case SplitPreset::kDesk:
      return "desk";
  }
  throw ArgumentError("unknown split preset");
}

SplitPreset parse_preset(std::string_view name) {
  if (name == "small") return SplitPreset::kSmall;
  if (name == "large") return SplitPreset::kLarge;
  if (name == "desk") return SplitPreset::kDesk;
  throw ConfigError("unknown dataset preset '" + std::string(name) +
                    "' (expected small, large or desk)");
}

namespace {

// Directory listing sorted by filename; iteration order is not portable.
std::vector<std::string> list_wavs(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

DatasetSplits build_splits(const fs::path& root, SplitPreset preset,
                           std::uint64_t seed) {
  const SplitQuota quota = quota_for(preset);
  DatasetSplits splits;
  splits.root = root.string();
  splits.seed = seed;

  // Per-word quota for the unknown class, evenly spread (within +-1): the
  // first `rem` unknown words in canonical order take one extra example.
  const int n_unknown_words = static_cast<int>(corpus_words().size()) -
                              static_cast<int>(kKeywords.size());
  const int base = quota.unknown_total / n_unknown_words;
  const int rem = quota.unknown_total % n_unknown_words;

  std::vector<Example>* split_dest[3] = {&splits.train, &splits.validation,
                                         &splits.test};

  int unknown_rank = 0;
  for (const std::string& word : corpus_words()) {
    const int class_index = LabelMap::class_of(word);
    int per_split = quota.per_keyword;
    if (class_index == kUnknownClass) {
      per_split = base + (unknown_rank < rem ? 1 : 0);
      ++unknown_rank;
    }

    const fs::path dir = root / word;
    if (!fs::is_directory(dir)) {
      throw DatasetError("missing word directory '" + word + "' under '" +
                         root.string() + "'");
    }
    std::vector<std::string> files = list_wavs(dir);
    const std::size_t needed = static_cast<std::size_t>(per_split) * 3;
    if (files.size() < needed) {
      throw DatasetError("word '" + word + "' has " + std::to_string(files.size()) +
                         " files, needs " + std::to_string(needed) + " for the " +
                         std::string(preset_name(preset)) + " preset");
    }

    SplitMix64 rng(mix_seed(seed, fnv1a(word)));
    deterministic_shuffle(files, rng);

    std::size_t cursor = 0;
    for (int s = 0; s < 3; ++s) {
      for (int i = 0; i < per_split; ++i) {
        split_dest[s]->push_back(Example{word + "/" + files[cursor++], class_index});
      }
      splits.per_class_counts[static_cast<std::size_t>(s)]
                             [static_cast<std::size_t>(class_index)] += per_split;
    }
  }
  return splits;
}

namespace {

void write_split(std::ostream& out, const std::vector<Example>& examples,
                 std::string_view name) {
  for (const Example& e : examples) {
    out << e.path << ',' << e.class_index << ',' << name << '\n';
  }
}

}  // namespace

void write_manifest_csv(const DatasetSplits& splits, std::ostream& out) {
  out << "path,class_index,split\n";
  write_split(out, splits.train, "train");
  write_split(out, splits.validation, "validation");
  write_split(out, splits.test, "test");
}

std::uint64_t manifest_digest(const DatasetSplits& splits) {
  std::uint64_t h = fnv1a(splits.seed);
  auto fold = [&h](const std::vector<Example>& examples) {
    for (const Example& e : examples) {
      h = fnv1a(e.path, h);
      h = fnv1a(static_cast<std::uint64_t>(e.class_index), h);
    }
  };
  fold(splits.train);
  fold(splits.validation);
  fold(splits.test);
  return h;
}

}  // namespace afb
