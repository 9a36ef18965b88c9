#include "afb/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support/synth_corpus.hpp"

using namespace afb;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string manifest_string(const DatasetSplits& splits) {
  std::ostringstream out;
  write_manifest_csv(splits, out);
  return out.str();
}

}  // namespace

TEST_CASE("label map fixes the keyword order and the unknown class") {
  CHECK(LabelMap::num_classes() == 11);
  CHECK(LabelMap::class_of("yes") == 0);
  CHECK(LabelMap::class_of("go") == 9);
  CHECK(LabelMap::class_of("sheila") == kUnknownClass);
  CHECK(LabelMap::class_name(10) == "unknown");
  CHECK(corpus_words().size() == 35);
}

TEST_CASE("waveform loading scales, pads and truncates") {
  TempDir dir("afb_wav_test");

  SUBCASE("full-scale negative peak maps to -1") {
    std::vector<double> samples(16000, 0.0);
    samples[10] = -1.0;  // writes code -32768
    testing::write_wav_pcm16_mono(dir.path / "full.wav", samples, 16000);
    const Waveform w = load_waveform(dir.path / "full.wav");
    REQUIRE(w.samples.size() == 16000);
    CHECK(*std::min_element(w.samples.begin(), w.samples.end()) == -1.0);
  }

  SUBCASE("short clips are zero-padded at the end") {
    std::vector<double> samples(14500, 0.25);
    testing::write_wav_pcm16_mono(dir.path / "short.wav", samples, 16000);
    const Waveform w = load_waveform(dir.path / "short.wav");
    REQUIRE(w.samples.size() == 16000);
    for (std::size_t i = 14500; i < 16000; ++i) {
      CHECK(w.samples[i] == 0.0);
    }
    CHECK(w.samples[0] == doctest::Approx(0.25).epsilon(1e-3));
  }

  SUBCASE("long clips are truncated") {
    std::vector<double> samples(20000, 0.1);
    testing::write_wav_pcm16_mono(dir.path / "long.wav", samples, 16000);
    CHECK(load_waveform(dir.path / "long.wav").samples.size() == 16000);
  }

  SUBCASE("wrong sample rates are unsupported") {
    std::vector<double> samples(1000, 0.0);
    testing::write_wav_pcm16_mono(dir.path / "rate.wav", samples, 44100);
    CHECK_THROWS_AS(load_waveform(dir.path / "rate.wav"), FormatError);
  }

  SUBCASE("corrupt files are parse errors") {
    std::ofstream bad(dir.path / "bad.wav", std::ios::binary);
    bad << "RIFFgarbage";
    bad.close();
    CHECK_THROWS_AS(load_waveform(dir.path / "bad.wav"), ParseError);
  }
}

TEST_CASE("small preset hits the exact per-class quotas") {
  TempDir dir("afb_stub_small");
  testing::make_stub_corpus(dir.path, 600, 96);
  const DatasetSplits splits = build_splits(dir.path, SplitPreset::kSmall, 7);

  CHECK(splits.train.size() == 2800);
  CHECK(splits.validation.size() == 2800);
  CHECK(splits.test.size() == 2800);
  for (int s = 0; s < 3; ++s) {
    for (int k = 0; k < 10; ++k) {
      CHECK(splits.per_class_counts[static_cast<std::size_t>(s)]
                                   [static_cast<std::size_t>(k)] == 200);
    }
    CHECK(splits.per_class_counts[static_cast<std::size_t>(s)][kUnknownClass] == 800);
  }

  // Disjoint by path across the three splits.
  std::set<std::string> seen;
  for (const auto* split : {&splits.train, &splits.validation, &splits.test}) {
    for (const Example& e : *split) {
      CHECK(seen.insert(e.path).second);
    }
  }

  // Unknown examples are balanced across the 25 words.
  std::map<std::string, int> per_word;
  for (const Example& e : splits.train) {
    if (e.class_index == kUnknownClass) {
      per_word[e.path.substr(0, e.path.find('/'))]++;
    }
  }
  CHECK(per_word.size() == 25);
  for (const auto& [word, count] : per_word) {
    CHECK(count == 32);  // 800 / 25
  }
}

TEST_CASE("desk preset quotas") {
  TempDir dir("afb_stub_desk");
  testing::make_stub_corpus(dir.path, 150, 24);
  const DatasetSplits splits = build_splits(dir.path, SplitPreset::kDesk, 3);
  CHECK(splits.train.size() == 700);
  CHECK(splits.validation.size() == 700);
  CHECK(splits.test.size() == 700);
  CHECK(splits.per_class_counts[0][0] == 50);
  CHECK(splits.per_class_counts[0][kUnknownClass] == 200);
}

TEST_CASE("split construction is deterministic and seed-sensitive") {
  TempDir dir("afb_stub_seeds");
  testing::make_stub_corpus(dir.path, 600, 96);

  const DatasetSplits a = build_splits(dir.path, SplitPreset::kSmall, 0);
  const DatasetSplits b = build_splits(dir.path, SplitPreset::kSmall, 0);
  CHECK(manifest_string(a) == manifest_string(b));

  const DatasetSplits c = build_splits(dir.path, SplitPreset::kSmall, 1);
  CHECK(manifest_string(a) != manifest_string(c));
  CHECK(manifest_digest(a) != manifest_digest(c));
}

TEST_CASE("missing directories and short quotas name the word") {
  TempDir dir("afb_stub_missing");
  testing::make_stub_corpus(dir.path, 600, 96);
  fs::remove_all(dir.path / "marvin");
  CHECK_THROWS_WITH_AS(build_splits(dir.path, SplitPreset::kSmall, 0),
                       doctest::Contains("marvin"), DatasetError);

  TempDir dir2("afb_stub_short");
  testing::make_stub_corpus(dir2.path, 599, 96);  // one keyword file short
  CHECK_THROWS_WITH_AS(build_splits(dir2.path, SplitPreset::kSmall, 0),
                       doctest::Contains("yes"), DatasetError);
}

TEST_CASE("manifest carries the header and split names") {
  TempDir dir("afb_stub_manifest");
  testing::make_stub_corpus(dir.path, 150, 24);
  const DatasetSplits splits = build_splits(dir.path, SplitPreset::kDesk, 11);
  const std::string text = manifest_string(splits);
  CHECK(text.rfind("path,class_index,split\n", 0) == 0);
  CHECK(text.find(",train\n") != std::string::npos);
  CHECK(text.find(",validation\n") != std::string::npos);
  CHECK(text.find(",test\n") != std::string::npos);
}
