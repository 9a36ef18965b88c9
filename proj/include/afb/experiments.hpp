// Experiment harness: one-parameter-at-a-time sweeps with repeated trials and
// confidence intervals, and the head-to-head comparison of two filterbank
// configurations. Trial seeds are derived by hashing (base seed, point,
// trial), so any execution schedule yields byte-identical results.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afb/classifier.hpp"
#include "afb/dataset.hpp"
#include "afb/extractor.hpp"
#include "afb/power.hpp"

namespace afb {

enum class SweepParameter { kNFilters, kFMax, kQ };

std::string_view sweep_parameter_name(SweepParameter p);
/// Parses "n_filters" / "f_max" / "q"; throws ConfigError otherwise.
SweepParameter parse_sweep_parameter(std::string_view name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kNFilters;
  std::vector<double> values;
  FilterbankConfig base;  // defaults to the typical configuration
  EnvelopeConfig envelope;
  TrainConfig train;
  int trials = 3;
  SplitPreset dataset_preset = SplitPreset::kSmall;
  std::uint64_t base_seed = 0;

  SweepSpec() : base(typical_config()) {}

  void validate() const;
  /// The base config with the swept parameter replaced by `value`.
  FilterbankConfig config_for(double value) const;
};

/// The three standard sweeps: 15 filter counts, 15 maximum frequencies and
/// 17 quality factors (47 points), all holding the non-swept parameters at
/// their typical values.
std::array<SweepSpec, 3> default_sweeps();

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  bool ok = false;
  std::string error;  // set when ok is false
};

struct SweepPointResult {
  double value = 0.0;
  FilterbankConfig config;
  double relative_power = 0.0;
  std::vector<TrialRecord> trials;
  double mean_accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool ci_flagged = false;  // fewer successful trials than requested
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::kNFilters;
  std::vector<SweepPointResult> points;
};

struct RunOptions {
  int workers = 1;
  std::filesystem::path cache_dir;  // empty: no on-disk feature cache
};

/// Normalized train/test features plus raw validation features for one
/// filterbank instance.
struct FeatureSet {
  std::vector<Sample> train, validation, test;
};

/// Extracts features for every split (optionally through the on-disk cache),
/// fits the per-channel normalizer on the training split only and applies it
/// to train and test.
FeatureSet prepare_features(const FilterbankDesign& design, const EnvelopeConfig& env,
                            const DatasetSplits& splits, const RunOptions& options);

/// Per point: extract features once, then train and test `trials` models with
/// seeds hash(base_seed, point, trial). A diverged trial is recorded, not
/// dropped; the interval is then computed over the successful trials and
/// flagged.
SweepResult run_sweep(const SweepSpec& spec, const DatasetSplits& splits,
                      const RunOptions& options = {});

struct ConfigOutcome {
  FilterbankConfig config;
  std::vector<TrialRecord> trials;
  double mean_accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool ci_flagged = false;
};

struct ComparisonResult {
  ConfigOutcome a, b;
  double power_ratio = 0.0;       // power(a) / power(b)
  double accuracy_delta = 0.0;    // mean(a) - mean(b)
  int trials = 0;
};

/// Trains and tests both configurations `trials` times with shared per-trial
/// seeds hash(base_seed, trial), so comparing a configuration against itself
/// is an exact tie.
ComparisonResult compare_configs(const FilterbankConfig& a, const FilterbankConfig& b,
                                 int trials, const DatasetSplits& splits,
                                 const EnvelopeConfig& env, const TrainConfig& train_config,
                                 std::uint64_t base_seed, const RunOptions& options = {});

// CSV with columns sweep_param,point_value,trial,seed,accuracy,relative_power,
// ci_low,ci_high (interval repeated on each of the point's rows).
void write_sweep_csv(const SweepResult& result, std::ostream& out);
SweepResult read_sweep_csv(std::istream& in);

void write_comparison_csv(const ComparisonResult& result, std::ostream& out);
void write_comparison_report(const ComparisonResult& result, std::ostream& out);

/// Accuracy-vs-parameter chart with the confidence band; log x axis for the
/// f_max and Q sweeps.
std::string sweep_chart_svg(const SweepResult& result);
std::string spectrogram_svg(const Spectrogram& s, const std::string& title);
std::string confusion_svg(const EvalResult& result, const std::string& title);

}  // namespace afb
