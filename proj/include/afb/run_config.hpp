// Plain-text key/value run configuration with [filterbank], [envelope],
// [dataset], [train] and [sweep] sections. Unknown sections or keys are
// rejected; missing keys fall back to the built-in defaults.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afb/classifier.hpp"
#include "afb/envelope.hpp"
#include "afb/filterbank.hpp"

namespace afb {

struct RunConfigFile {
  // [filterbank]
  std::optional<int> n_filters;
  std::optional<double> f_max_hz;
  std::optional<double> q;
  std::optional<double> f_min_hz;
  // [envelope]
  std::optional<double> window_ms;
  std::optional<double> hop_ms;
  // [dataset]
  std::optional<std::string> dataset_root;
  std::optional<std::string> dataset_preset;
  std::optional<std::uint64_t> dataset_seed;
  // [train]
  std::optional<std::string> train_preset;  // "paper" or "default"
  std::optional<double> momentum;
  std::optional<double> learning_rate;
  std::optional<double> lr_decay;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> l2;
  // [sweep]
  std::optional<std::string> sweep_parameter;
  std::optional<std::vector<double>> sweep_values;
  std::optional<int> sweep_trials;

  static RunConfigFile parse(std::istream& in);
  static RunConfigFile parse_file(const std::string& path);

  /// Layer the file's values over defaults.
  FilterbankConfig filterbank(const FilterbankConfig& defaults) const;
  EnvelopeConfig envelope(const EnvelopeConfig& defaults) const;
  TrainConfig train(const TrainConfig& defaults) const;
};

}  // namespace afb
