// Test fixtures: a PCM16 WAV writer, empty stub corpora for split-sampling
// tests, and a synthetic 35-word corpus whose classes are separable by
// band-power features. Each word is a two-tone chord below 1.8 kHz with a
// word-specific spectral interval, burst count and glide direction; those
// cues survive frequency translation, so a convolutional classifier with
// global pooling can pick them up. Base pitch, level, onset and a low noise
// floor vary per example and carry no class information.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "afb/rng.hpp"

namespace afb::testing {

void write_wav_pcm16_mono(const std::filesystem::path& path,
                          const std::vector<double>& samples, std::uint32_t sample_rate);

/// Word directories holding empty *.wav entries; enough for split-construction
/// tests, which never open the files.
void make_stub_corpus(const std::filesystem::path& root, int files_per_keyword,
                      int files_per_unknown);

/// Full synthetic corpus: `files_per_word` one-second clips for each of the
/// 35 words. Deterministic per (seed, word, index).
void make_synth_corpus(const std::filesystem::path& root, int files_per_word,
                       std::uint64_t seed);

/// One synthetic clip for the given word index (position in corpus_words()).
std::vector<double> synth_clip(int word_index, std::uint64_t seed);

/// Standard-normal variate via Box-Muller on the deterministic generator.
double gaussian(SplitMix64& rng);

}  // namespace afb::testing
