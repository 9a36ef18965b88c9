#include "afb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "afb/parallel.hpp"
#include "afb/rng.hpp"
#include "afb/svg.hpp"

namespace afb {

namespace fs = std::filesystem;

std::string_view sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::kNFilters:
      return "n_filters";
    case SweepParameter::kFMax:
      return "f_max";
    case SweepParameter::kQ:
      return "q";
  }
  throw ArgumentError("unknown sweep parameter");
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "n_filters") return SweepParameter::kNFilters;
  if (name == "f_max") return SweepParameter::kFMax;
  if (name == "q") return SweepParameter::kQ;
  throw ConfigError("unknown sweep parameter '" + std::string(name) +
                    "' (expected n_filters, f_max or q)");
}

void SweepSpec::validate() const {
  if (values.empty()) {
    throw ConfigError("sweep value list must not be empty");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("sweep values must be positive and finite");
    }
  }
  if (trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  base.validate();
  envelope.validate();
  train.validate();
}

FilterbankConfig SweepSpec::config_for(double value) const {
  FilterbankConfig cfg = base;
  switch (parameter) {
    case SweepParameter::kNFilters:
      cfg.n_filters = static_cast<int>(std::llround(value));
      break;
    case SweepParameter::kFMax:
      cfg.f_max_hz = value;
      break;
    case SweepParameter::kQ:
      cfg.q_filter = value;
      break;
  }
  return cfg;
}

std::array<SweepSpec, 3> default_sweeps() {
  std::array<SweepSpec, 3> sweeps;
  sweeps[0].parameter = SweepParameter::kNFilters;
  sweeps[0].values = {1, 2, 4, 6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 48, 64};
  sweeps[1].parameter = SweepParameter::kFMax;
  sweeps[1].values = {250,  500,  1000, 2000, 3000,  4000,  5000, 6000,
                      7000, 8000, 9000, 10000, 12000, 16000, 20000};
  sweeps[2].parameter = SweepParameter::kQ;
  sweeps[2].values = {0.2, 0.4, 0.6, 0.8, 1, 2, 3, 4, 6, 8, 10, 15, 20, 25, 30, 40, 60};
  return sweeps;
}

namespace {

std::uint64_t config_digest(const FilterbankConfig& fb, const EnvelopeConfig& env) {
  auto bits = [](double v) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(v));
    std::memcpy(&u, &v, 8);
    return u;
  };
  std::uint64_t h = fnv1a("afb-features-v1");
  h = fnv1a(static_cast<std::uint64_t>(fb.n_filters), h);
  h = fnv1a(bits(fb.f_max_hz), h);
  h = fnv1a(bits(fb.q_filter), h);
  h = fnv1a(bits(fb.f_min_hz), h);
  h = fnv1a(bits(fb.sample_rate_hz), h);
  h = fnv1a(bits(env.window_ms), h);
  h = fnv1a(bits(env.hop_ms), h);
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

constexpr char kCacheMagic[4] = {'A', 'F', 'B', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

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
    throw ParseError("truncated feature cache");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

// Cache file: magic, version, count, then `count` spectrogram blocks.
void save_feature_cache(const fs::path& path, const std::vector<Sample>& samples) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw ParseError("cannot write feature cache '" + tmp.string() + "'");
    }
    out.write(kCacheMagic, 4);
    write_u32le(out, kCacheVersion);
    write_u32le(out, static_cast<std::uint32_t>(samples.size()));
    for (const Sample& s : samples) {
      save_spectrogram(s.features, out);
    }
  }
  fs::rename(tmp, path);
}

// Returns empty when the cache is missing or does not match.
std::optional<std::vector<Spectrogram>> load_feature_cache(const fs::path& path,
                                                           std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  try {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCacheMagic, 4) != 0) {
      return std::nullopt;
    }
    if (read_u32le(in) != kCacheVersion) {
      return std::nullopt;
    }
    const std::uint32_t count = read_u32le(in);
    if (count != expected) {
      return std::nullopt;
    }
    std::vector<Spectrogram> specs;
    specs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      specs.push_back(load_spectrogram(in));
    }
    return specs;
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::vector<Sample> extract_split(const FilterbankDesign& design,
                                  const EnvelopeConfig& env, const DatasetSplits& splits,
                                  const std::vector<Example>& examples,
                                  std::string_view split_name, const RunOptions& options) {
  std::vector<Sample> samples(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    samples[i].label = examples[i].class_index;
  }

  fs::path cache_path;
  if (!options.cache_dir.empty()) {
    const std::uint64_t key =
        fnv1a(manifest_digest(splits), config_digest(design.config, env));
    cache_path = options.cache_dir /
                 ("feat_" + hex_digest(key) + "_" + std::string(split_name) + ".afbc");
    if (auto cached = load_feature_cache(cache_path, examples.size())) {
      for (std::size_t i = 0; i < examples.size(); ++i) {
        samples[i].features = std::move((*cached)[i]);
      }
      return samples;
    }
  }

  const fs::path root(splits.root);
  parallel_for(examples.size(), options.workers, [&](std::size_t i) {
    const Waveform clip = load_waveform(root / examples[i].path);
    samples[i].features = extract_spectrogram(design, env, clip);
  });

  if (!cache_path.empty()) {
    fs::create_directories(options.cache_dir);
    save_feature_cache(cache_path, samples);
  }
  return samples;
}

void summarize_trials(const std::vector<TrialRecord>& trials, int requested,
                      double& mean_out, double& lo_out, double& hi_out, bool& flagged) {
  std::vector<double> accuracies;
  for (const TrialRecord& t : trials) {
    if (t.ok) {
      accuracies.push_back(t.accuracy);
    }
  }
  flagged = static_cast<int>(accuracies.size()) < requested;
  if (accuracies.empty()) {
    mean_out = lo_out = hi_out = 0.0;
    return;
  }
  double sum = 0.0;
  for (double a : accuracies) {
    sum += a;
  }
  mean_out = sum / static_cast<double>(accuracies.size());
  if (accuracies.size() >= 2) {
    const auto [lo, hi] = confidence_interval(accuracies, 0.95);
    lo_out = lo;
    hi_out = hi;
  } else {
    lo_out = hi_out = mean_out;
    flagged = true;
  }
}

TrialRecord run_trial(const FeatureSet& features, const TrainConfig& base_config,
                      int trial, std::uint64_t seed) {
  TrialRecord record;
  record.trial = trial;
  record.seed = seed;
  try {
    TrainConfig config = base_config;
    config.seed = seed;
    SmallNet model = init_model(seed);
    train(model, features.train, config);
    record.accuracy = evaluate(model, features.test).accuracy;
    record.ok = true;
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
  }
  return record;
}

}  // namespace

FeatureSet prepare_features(const FilterbankDesign& design, const EnvelopeConfig& env,
                            const DatasetSplits& splits, const RunOptions& options) {
  FeatureSet features;
  features.train = extract_split(design, env, splits, splits.train, "train", options);
  features.validation =
      extract_split(design, env, splits, splits.validation, "validation", options);
  features.test = extract_split(design, env, splits, splits.test, "test", options);

  std::vector<Spectrogram> train_specs;
  train_specs.reserve(features.train.size());
  for (const Sample& s : features.train) {
    train_specs.push_back(s.features);
  }
  const Normalizer norm = fit_normalizer(train_specs);
  for (Sample& s : features.train) {
    s.features = normalize(s.features, norm);
  }
  for (Sample& s : features.test) {
    s.features = normalize(s.features, norm);
  }
  return features;
}

SweepResult run_sweep(const SweepSpec& spec, const DatasetSplits& splits,
                      const RunOptions& options) {
  spec.validate();
  SweepResult result;
  result.parameter = spec.parameter;
  result.points.resize(spec.values.size());

  for (std::size_t p = 0; p < spec.values.size(); ++p) {
    SweepPointResult& point = result.points[p];
    point.value = spec.values[p];
    point.config = spec.config_for(spec.values[p]);
    point.relative_power = relative_power(point.config).relative_units;

    const FilterbankDesign design = make_filterbank(point.config);
    const FeatureSet features = prepare_features(design, spec.envelope, splits, options);

    point.trials.resize(static_cast<std::size_t>(spec.trials));
    parallel_for(static_cast<std::size_t>(spec.trials), options.workers,
                 [&](std::size_t t) {
                   const std::uint64_t seed =
                       mix_seed(mix_seed(spec.base_seed, p), t);
                   point.trials[t] =
                       run_trial(features, spec.train, static_cast<int>(t), seed);
                 });
    summarize_trials(point.trials, spec.trials, point.mean_accuracy, point.ci_low,
                     point.ci_high, point.ci_flagged);
  }
  return result;
}

ComparisonResult compare_configs(const FilterbankConfig& a, const FilterbankConfig& b,
                                 int trials, const DatasetSplits& splits,
                                 const EnvelopeConfig& env, const TrainConfig& train_config,
                                 std::uint64_t base_seed, const RunOptions& options) {
  if (trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  ComparisonResult result;
  result.trials = trials;
  result.a.config = a;
  result.b.config = b;
  result.power_ratio = power_ratio(a, b);

  ConfigOutcome* outcomes[2] = {&result.a, &result.b};
  for (ConfigOutcome* outcome : outcomes) {
    const FilterbankDesign design = make_filterbank(outcome->config);
    const FeatureSet features = prepare_features(design, env, splits, options);
    outcome->trials.resize(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), options.workers, [&](std::size_t t) {
      // Shared per-trial seeds: identical configurations tie exactly.
      const std::uint64_t seed = mix_seed(base_seed, t);
      outcome->trials[t] = run_trial(features, train_config, static_cast<int>(t), seed);
    });
    summarize_trials(outcome->trials, trials, outcome->mean_accuracy, outcome->ci_low,
                     outcome->ci_high, outcome->ci_flagged);
  }
  result.accuracy_delta = result.a.mean_accuracy - result.b.mean_accuracy;
  return result;
}

namespace {

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "sweep_param,point_value,trial,seed,accuracy,relative_power,ci_low,ci_high\n";
  for (const SweepPointResult& point : result.points) {
    for (const TrialRecord& t : point.trials) {
      out << sweep_parameter_name(result.parameter) << ',' << csv_double(point.value)
          << ',' << t.trial << ',' << t.seed << ','
          << (t.ok ? csv_double(t.accuracy) : "failed") << ','
          << csv_double(point.relative_power) << ',' << csv_double(point.ci_low) << ','
          << csv_double(point.ci_high) << '\n';
    }
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "sweep_param,point_value,trial,seed,accuracy,relative_power,ci_low,ci_high") {
    throw ParseError("not a sweep results CSV (bad header)");
  }
  SweepResult result;
  bool have_param = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() != 8) {
      throw ParseError("bad sweep CSV row: '" + line + "'");
    }
    const SweepParameter param = parse_sweep_parameter(fields[0]);
    if (!have_param) {
      result.parameter = param;
      have_param = true;
    } else if (param != result.parameter) {
      throw ParseError("mixed sweep parameters in one CSV");
    }
    const double value = std::stod(fields[1]);
    if (result.points.empty() || result.points.back().value != value) {
      SweepPointResult point;
      point.value = value;
      point.relative_power = std::stod(fields[5]);
      point.ci_low = std::stod(fields[6]);
      point.ci_high = std::stod(fields[7]);
      result.points.push_back(point);
    }
    TrialRecord t;
    t.trial = std::stoi(fields[2]);
    t.seed = std::stoull(fields[3]);
    t.ok = fields[4] != "failed";
    t.accuracy = t.ok ? std::stod(fields[4]) : 0.0;
    result.points.back().trials.push_back(t);
  }
  for (SweepPointResult& point : result.points) {
    bool flagged = false;
    summarize_trials(point.trials, static_cast<int>(point.trials.size()),
                     point.mean_accuracy, point.ci_low, point.ci_high, flagged);
    point.ci_flagged = flagged;
  }
  return result;
}

void write_comparison_csv(const ComparisonResult& result, std::ostream& out) {
  out << "config,n_filters,f_max_hz,q,relative_power,trial,seed,accuracy,"
         "mean_accuracy,ci_low,ci_high\n";
  const ConfigOutcome* outcomes[2] = {&result.a, &result.b};
  const char* names[2] = {"a", "b"};
  for (int i = 0; i < 2; ++i) {
    const ConfigOutcome& o = *outcomes[i];
    for (const TrialRecord& t : o.trials) {
      out << names[i] << ',' << o.config.n_filters << ',' << csv_double(o.config.f_max_hz)
          << ',' << csv_double(o.config.q_filter) << ','
          << csv_double(relative_power(o.config).relative_units) << ',' << t.trial << ','
          << t.seed << ',' << (t.ok ? csv_double(t.accuracy) : "failed") << ','
          << csv_double(o.mean_accuracy) << ',' << csv_double(o.ci_low) << ','
          << csv_double(o.ci_high) << '\n';
    }
  }
}

void write_comparison_report(const ComparisonResult& result, std::ostream& out) {
  auto describe = [&out](const char* name, const ConfigOutcome& o) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s: N=%d, f_max=%.0f Hz, Q=%g | relative power %.0f | "
                  "accuracy %.2f%% (95%% CI [%.2f%%, %.2f%%])%s\n",
                  name, o.config.n_filters, o.config.f_max_hz, o.config.q_filter,
                  relative_power(o.config).relative_units, 100.0 * o.mean_accuracy,
                  100.0 * o.ci_low, 100.0 * o.ci_high,
                  o.ci_flagged ? " [fewer trials than requested]" : "");
    out << buf;
  };
  describe("config A", result.a);
  describe("config B", result.b);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "power ratio A/B: %.2f\naccuracy delta A-B: %+.2f%%\n",
                result.power_ratio, 100.0 * result.accuracy_delta);
  out << buf;
}

std::string sweep_chart_svg(const SweepResult& result) {
  std::vector<SeriesPoint> points;
  points.reserve(result.points.size());
  for (const SweepPointResult& p : result.points) {
    points.push_back(SeriesPoint{p.value, 100.0 * p.mean_accuracy, 100.0 * p.ci_low,
                                 100.0 * p.ci_high});
  }
  ChartOptions options;
  options.title = "accuracy vs " + std::string(sweep_parameter_name(result.parameter));
  options.x_label = std::string(sweep_parameter_name(result.parameter));
  options.y_label = "test accuracy (%)";
  options.log_x = result.parameter != SweepParameter::kNFilters;
  return line_chart_svg(points, options);
}

std::string spectrogram_svg(const Spectrogram& s, const std::string& title) {
  std::vector<double> values(s.values.begin(), s.values.end());
  HeatmapOptions options;
  options.title = title;
  options.x_label = "frame";
  options.y_label = "channel";
  options.flip_rows = true;  // low frequencies at the bottom
  return heatmap_svg(values, s.n_channels, s.n_frames, options);
}

std::string confusion_svg(const EvalResult& result, const std::string& title) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(kNumClasses) * kNumClasses);
  std::vector<std::string> labels;
  for (int r = 0; r < kNumClasses; ++r) {
    labels.emplace_back(LabelMap::class_name(r));
    for (int c = 0; c < kNumClasses; ++c) {
      values.push_back(static_cast<double>(
          result.confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]));
    }
  }
  HeatmapOptions options;
  options.title = title;
  options.x_label = "predicted";
  options.y_label = "true";
  options.row_labels = labels;
  options.col_labels = labels;
  options.annotate_cells = true;
  return heatmap_svg(values, kNumClasses, kNumClasses, options);
}

}  // namespace afb
