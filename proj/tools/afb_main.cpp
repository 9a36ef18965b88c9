// afb: command-line front end for the analog-filterbank feature-extraction
// lab. Subcommands cover filter design inspection, feature extraction, the
// relative power model, dataset split construction, classifier training and
// evaluation, parameter sweeps, config comparisons and CSV-to-SVG plotting.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "afb/classifier.hpp"
#include "afb/dataset.hpp"
#include "afb/envelope.hpp"
#include "afb/experiments.hpp"
#include "afb/extractor.hpp"
#include "afb/filterbank.hpp"
#include "afb/power.hpp"
#include "afb/run_config.hpp"
#include "afb/svg.hpp"

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// option bundles shared by several subcommands

struct FilterbankOpts {
  std::optional<std::string> preset;
  std::optional<int> n;
  std::optional<double> fmax, q, fmin, rate;
};

void add_filterbank_options(CLI::App* cmd, FilterbankOpts& o) {
  cmd->add_option("--preset", o.preset, "filterbank preset: typical or tiny");
  cmd->add_option("--n", o.n, "number of filters");
  cmd->add_option("--fmax", o.fmax, "center frequency of the highest filter (Hz)");
  cmd->add_option("--q", o.q, "quality factor shared by all filters");
  cmd->add_option("--fmin", o.fmin, "center frequency of the lowest filter (Hz)");
  cmd->add_option("--rate", o.rate, "sample rate (Hz)");
}

afb::FilterbankConfig preset_config(const std::string& name) {
  if (name == "typical") {
    return afb::typical_config();
  }
  if (name == "tiny") {
    return afb::tiny_config();
  }
  throw afb::ConfigError("unknown filterbank preset '" + name +
                         "' (expected typical or tiny)");
}

afb::FilterbankConfig resolve_filterbank(const FilterbankOpts& o,
                                         const afb::RunConfigFile* file) {
  afb::FilterbankConfig cfg = afb::typical_config();
  if (file != nullptr) {
    cfg = file->filterbank(cfg);
  }
  if (o.preset) {
    cfg = preset_config(*o.preset);
  }
  if (o.n) cfg.n_filters = *o.n;
  if (o.fmax) cfg.f_max_hz = *o.fmax;
  if (o.q) cfg.q_filter = *o.q;
  if (o.fmin) cfg.f_min_hz = *o.fmin;
  if (o.rate) cfg.sample_rate_hz = *o.rate;
  cfg.validate();
  return cfg;
}

struct EnvelopeOpts {
  std::optional<double> window_ms, hop_ms;
};

void add_envelope_options(CLI::App* cmd, EnvelopeOpts& o) {
  cmd->add_option("--window-ms", o.window_ms, "envelope window length (ms)");
  cmd->add_option("--hop-ms", o.hop_ms, "envelope hop (ms)");
}

afb::EnvelopeConfig resolve_envelope(const EnvelopeOpts& o, const afb::RunConfigFile* file,
                                     double sample_rate_hz) {
  afb::EnvelopeConfig cfg;
  if (file != nullptr) {
    cfg = file->envelope(cfg);
  }
  if (o.window_ms) cfg.window_ms = *o.window_ms;
  if (o.hop_ms) cfg.hop_ms = *o.hop_ms;
  cfg.sample_rate_hz = sample_rate_hz;
  cfg.validate();
  return cfg;
}

struct DatasetOpts {
  std::string root;
  std::string preset = "small";
  std::uint64_t seed = 0;
};

void add_dataset_options(CLI::App* cmd, DatasetOpts& o) {
  cmd->add_option("--root", o.root, "corpus root directory (word subdirectories)")
      ->envname("AFB_DATA_ROOT");
  cmd->add_option("--dataset-preset", o.preset,
                  "split quota preset: small, large or desk");
  cmd->add_option("--seed", o.seed, "seed for split sampling and training");
}

afb::DatasetSplits resolve_splits(const DatasetOpts& o, const afb::RunConfigFile* file) {
  std::string root = o.root;
  std::string preset = o.preset;
  std::uint64_t seed = o.seed;
  if (file != nullptr) {
    if (root.empty() && file->dataset_root) root = *file->dataset_root;
    if (file->dataset_preset) preset = *file->dataset_preset;
    if (file->dataset_seed) seed = *file->dataset_seed;
  }
  if (root.empty()) {
    throw afb::ConfigError("no dataset root given (use --root or AFB_DATA_ROOT)");
  }
  return afb::build_splits(root, afb::parse_preset(preset), seed);
}

struct TrainOpts {
  std::optional<std::string> preset;
  std::optional<double> lr, momentum, decay, l2;
  std::optional<int> epochs, batch;
};

void add_train_options(CLI::App* cmd, TrainOpts& o) {
  cmd->add_option("--train-preset", o.preset, "training preset: default or paper");
  cmd->add_option("--lr", o.lr, "initial learning rate");
  cmd->add_option("--momentum", o.momentum, "momentum coefficient");
  cmd->add_option("--lr-decay", o.decay, "per-epoch learning-rate factor");
  cmd->add_option("--epochs", o.epochs, "number of epochs");
  cmd->add_option("--batch", o.batch, "minibatch size");
  cmd->add_option("--l2", o.l2, "L2 regularization coefficient");
}

afb::TrainConfig resolve_train(const TrainOpts& o, const afb::RunConfigFile* file,
                               std::uint64_t seed) {
  afb::TrainConfig cfg;
  if (file != nullptr) {
    cfg = file->train(cfg);
  }
  if (o.preset) {
    if (*o.preset == "paper") {
      cfg = afb::paper_train_config();
    } else if (*o.preset != "default") {
      throw afb::ConfigError("unknown train preset '" + *o.preset +
                             "' (expected default or paper)");
    }
  }
  if (o.lr) cfg.learning_rate = *o.lr;
  if (o.momentum) cfg.momentum = *o.momentum;
  if (o.decay) cfg.lr_decay = *o.decay;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.batch) cfg.batch_size = *o.batch;
  if (o.l2) cfg.l2 = *o.l2;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

// "typical", "tiny" or "N,FMAX,Q".
afb::FilterbankConfig parse_config_spec(const std::string& spec) {
  if (spec == "typical" || spec == "tiny") {
    return preset_config(spec);
  }
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    parts.push_back(item);
  }
  if (parts.size() != 3) {
    throw afb::ConfigError("config spec '" + spec +
                           "' must be typical, tiny or N,FMAX_HZ,Q");
  }
  afb::FilterbankConfig cfg = afb::typical_config();
  try {
    cfg.n_filters = std::stoi(parts[0]);
    cfg.f_max_hz = std::stod(parts[1]);
    cfg.q_filter = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw afb::ConfigError("cannot parse config spec '" + spec + "'");
  }
  cfg.validate();
  return cfg;
}

fs::path ensure_out_dir(const std::string& out) {
  const fs::path dir(out.empty() ? "out" : out);
  fs::create_directories(dir);
  return dir;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw afb::ParseError("cannot open '" + path.string() + "' for writing");
  }
  f << text;
}

int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_design(const afb::FilterbankConfig& cfg) {
  const afb::FilterbankDesign design = afb::make_filterbank(cfg);
  for (std::size_t k = 0; k < design.channels.size(); ++k) {
    const afb::BiquadCoeffs& ch = design.channels[k];
    if (ch.active) {
      const afb::MeasuredBand band = afb::measure_band(ch, cfg.sample_rate_hz);
      std::printf("%3zu  %10.2f Hz  Q %8.3f  band [%.1f, %.1f] Hz\n", k,
                  design.centers_hz[k], band.q, band.f_low_hz, band.f_high_hz);
    } else {
      std::printf("%3zu  %10.2f Hz  inactive\n", k, design.centers_hz[k]);
    }
  }
  return 0;
}

int cmd_power(const std::string& a_spec, const std::string& b_spec) {
  const afb::FilterbankConfig a = parse_config_spec(a_spec);
  if (b_spec.empty()) {
    std::printf("%.6g\n", afb::relative_power(a).relative_units);
  } else {
    const afb::FilterbankConfig b = parse_config_spec(b_spec);
    std::printf("%.2f\n", afb::power_ratio(a, b));
  }
  return 0;
}

int cmd_extract(const afb::FilterbankConfig& cfg, const afb::EnvelopeConfig& env,
                const std::string& wav, const std::string& out, bool svg) {
  const fs::path out_dir = ensure_out_dir(out);
  const afb::Waveform clip = afb::load_waveform(wav);
  const afb::FilterbankDesign design = afb::make_filterbank(cfg);
  const afb::Spectrogram spec = afb::extract_spectrogram(design, env, clip);

  const std::string stem = fs::path(wav).stem().string();
  const fs::path spec_path = out_dir / (stem + ".afbs");
  afb::save_spectrogram_file(spec, spec_path);
  std::printf("wrote %s (%d channels x %d frames)\n", spec_path.string().c_str(),
              spec.n_channels, spec.n_frames);
  if (svg) {
    const fs::path svg_path = out_dir / (stem + ".svg");
    write_text_file(svg_path, afb::spectrogram_svg(spec, "spectrogram: " + stem));
    std::printf("wrote %s\n", svg_path.string().c_str());
  }
  return 0;
}

int cmd_splits(const DatasetOpts& opts, const afb::RunConfigFile* file,
               const std::string& out) {
  const fs::path out_dir = ensure_out_dir(out);
  const afb::DatasetSplits splits = resolve_splits(opts, file);
  const fs::path manifest = out_dir / "manifest.csv";
  std::ofstream f(manifest, std::ios::binary);
  afb::write_manifest_csv(splits, f);
  std::printf("train %zu, validation %zu, test %zu examples -> %s\n",
              splits.train.size(), splits.validation.size(), splits.test.size(),
              manifest.string().c_str());
  return 0;
}

int cmd_train(const afb::FilterbankConfig& cfg, const afb::EnvelopeConfig& env,
              const DatasetOpts& ds, const TrainOpts& tr, const afb::RunConfigFile* file,
              const std::string& out, int workers, const std::string& cache_dir) {
  const fs::path out_dir = ensure_out_dir(out);
  const afb::DatasetSplits splits = resolve_splits(ds, file);
  const afb::TrainConfig train_config = resolve_train(tr, file, ds.seed);

  afb::RunOptions options;
  options.workers = workers;
  if (!cache_dir.empty()) {
    options.cache_dir = cache_dir;
  }
  const afb::FilterbankDesign design = afb::make_filterbank(cfg);
  const afb::FeatureSet features = afb::prepare_features(design, env, splits, options);

  afb::SmallNet model = afb::init_model(train_config.seed);
  const std::vector<afb::EpochStats> history =
      afb::train(model, features.train, train_config);

  const fs::path model_path = out_dir / "model.afbm";
  afb::save_model(model, model_path);
  std::ofstream hist(out_dir / "train_history.csv", std::ios::binary);
  hist << "epoch,mean_loss,train_accuracy,learning_rate\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6g\n", e, history[e].mean_loss,
                  history[e].train_accuracy, history[e].learning_rate);
    hist << buf;
  }
  std::printf("final train loss %.4f, train accuracy %.2f%% -> %s\n",
              history.back().mean_loss, 100.0 * history.back().train_accuracy,
              model_path.string().c_str());
  return 0;
}

int cmd_eval(const afb::FilterbankConfig& cfg, const afb::EnvelopeConfig& env,
             const DatasetOpts& ds, const afb::RunConfigFile* file,
             const std::string& model_path, const std::string& out, int workers,
             const std::string& cache_dir) {
  const fs::path out_dir = ensure_out_dir(out);
  const afb::DatasetSplits splits = resolve_splits(ds, file);

  afb::RunOptions options;
  options.workers = workers;
  if (!cache_dir.empty()) {
    options.cache_dir = cache_dir;
  }
  // The checkpoint stores only parameters; the normalizer is refit on the
  // training split, so the dataset/filterbank flags must match the ones used
  // for training.
  const afb::FilterbankDesign design = afb::make_filterbank(cfg);
  const afb::FeatureSet features = afb::prepare_features(design, env, splits, options);

  const afb::SmallNet model = afb::load_model(model_path);
  const afb::EvalResult result = afb::evaluate(model, features.test);

  std::ofstream conf(out_dir / "confusion.csv", std::ios::binary);
  conf << "true_class";
  for (int c = 0; c < afb::kNumClasses; ++c) {
    conf << ',' << afb::LabelMap::class_name(c);
  }
  conf << '\n';
  for (int r = 0; r < afb::kNumClasses; ++r) {
    conf << afb::LabelMap::class_name(r);
    for (int c = 0; c < afb::kNumClasses; ++c) {
      conf << ','
           << result.confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    conf << '\n';
  }
  write_text_file(out_dir / "confusion.svg",
                  afb::confusion_svg(result, "confusion matrix"));
  std::printf("test accuracy %.2f%% over %d examples\n", 100.0 * result.accuracy,
              result.total);
  return 0;
}

int cmd_sweep(const std::string& param, const std::vector<double>& values,
              std::optional<int> trials, const afb::FilterbankConfig& base,
              const afb::EnvelopeConfig& env, const DatasetOpts& ds, const TrainOpts& tr,
              const afb::RunConfigFile* file, const std::string& out, int workers,
              const std::string& cache_dir) {
  const fs::path out_dir = ensure_out_dir(out);

  afb::SweepSpec spec;
  std::string param_name = param;
  if (file != nullptr && param_name.empty() && file->sweep_parameter) {
    param_name = *file->sweep_parameter;
  }
  if (param_name.empty()) {
    throw afb::ConfigError("no sweep parameter given (use --param)");
  }
  spec.parameter = afb::parse_sweep_parameter(param_name);
  spec.base = base;
  spec.envelope = env;
  spec.train = resolve_train(tr, file, ds.seed);
  spec.base_seed = ds.seed;
  if (file != nullptr && file->sweep_trials) {
    spec.trials = *file->sweep_trials;
  }
  if (trials) {
    spec.trials = *trials;
  }
  if (!values.empty()) {
    spec.values = values;
  } else if (file != nullptr && file->sweep_values) {
    spec.values = *file->sweep_values;
  } else {
    for (const afb::SweepSpec& d : afb::default_sweeps()) {
      if (d.parameter == spec.parameter) {
        spec.values = d.values;
      }
    }
  }

  const afb::DatasetSplits splits = resolve_splits(ds, file);
  afb::RunOptions options;
  options.workers = workers;
  if (!cache_dir.empty()) {
    options.cache_dir = cache_dir;
  }

  const afb::SweepResult result = afb::run_sweep(spec, splits, options);

  const std::string stem = "sweep_" + std::string(afb::sweep_parameter_name(spec.parameter));
  std::ofstream csv(out_dir / (stem + ".csv"), std::ios::binary);
  afb::write_sweep_csv(result, csv);
  write_text_file(out_dir / (stem + ".svg"), afb::sweep_chart_svg(result));

  for (const afb::SweepPointResult& p : result.points) {
    std::printf("%s=%-8g power %12.6g  accuracy %6.2f%%  CI [%6.2f%%, %6.2f%%]%s\n",
                param_name.c_str(), p.value, p.relative_power, 100.0 * p.mean_accuracy,
                100.0 * p.ci_low, 100.0 * p.ci_high, p.ci_flagged ? " *" : "");
  }
  std::printf("wrote %s and %s\n", (out_dir / (stem + ".csv")).string().c_str(),
              (out_dir / (stem + ".svg")).string().c_str());
  return 0;
}

int cmd_compare(const std::string& a_spec, const std::string& b_spec, int trials,
                const afb::EnvelopeConfig& env, const DatasetOpts& ds, const TrainOpts& tr,
                const afb::RunConfigFile* file, const std::string& out, int workers,
                const std::string& cache_dir) {
  const fs::path out_dir = ensure_out_dir(out);
  const afb::FilterbankConfig a = parse_config_spec(a_spec);
  const afb::FilterbankConfig b = parse_config_spec(b_spec);
  const afb::DatasetSplits splits = resolve_splits(ds, file);
  const afb::TrainConfig train_config = resolve_train(tr, file, ds.seed);

  afb::RunOptions options;
  options.workers = workers;
  if (!cache_dir.empty()) {
    options.cache_dir = cache_dir;
  }
  const afb::ComparisonResult result =
      afb::compare_configs(a, b, trials, splits, env, train_config, ds.seed, options);

  std::ostringstream report;
  afb::write_comparison_report(result, report);
  std::ofstream csv(out_dir / "comparison.csv", std::ios::binary);
  afb::write_comparison_csv(result, csv);
  write_text_file(out_dir / "comparison.txt", report.str());
  std::fputs(report.str().c_str(), stdout);
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out) {
  const fs::path out_dir = ensure_out_dir(out);
  std::ifstream in(csv_path);
  if (!in) {
    throw afb::ParseError("cannot open '" + csv_path + "'");
  }
  const afb::SweepResult result = afb::read_sweep_csv(in);
  const fs::path svg_path = out_dir / (fs::path(csv_path).stem().string() + ".svg");
  write_text_file(svg_path, afb::sweep_chart_svg(result));
  std::printf("wrote %s\n", svg_path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analog filterbank feature-extraction lab"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "run configuration file (key = value sections)");

  // design
  auto* design = app.add_subcommand("design", "print center frequencies and measured Q");
  FilterbankOpts design_fb;
  add_filterbank_options(design, design_fb);

  // power
  auto* power = app.add_subcommand("power", "relative power estimate or ratio");
  std::string power_a, power_b;
  power->add_option("--a", power_a, "config: typical, tiny or N,FMAX,Q")->required();
  power->add_option("--b", power_b, "optional second config for a ratio");

  // extract
  auto* extract = app.add_subcommand("extract", "clip -> spectrogram file (and SVG)");
  FilterbankOpts extract_fb;
  EnvelopeOpts extract_env;
  std::string extract_wav, extract_out = "out";
  bool extract_svg = false;
  add_filterbank_options(extract, extract_fb);
  add_envelope_options(extract, extract_env);
  extract->add_option("--wav", extract_wav, "input WAV clip")->required();
  extract->add_option("--out", extract_out, "output directory");
  extract->add_flag("--svg", extract_svg, "also write a heatmap SVG");

  // splits
  auto* splits_cmd = app.add_subcommand("splits", "build dataset splits and export manifest");
  DatasetOpts splits_ds;
  std::string splits_out = "out";
  add_dataset_options(splits_cmd, splits_ds);
  splits_cmd->add_option("--out", splits_out, "output directory");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the classifier on a corpus");
  FilterbankOpts train_fb;
  EnvelopeOpts train_env;
  DatasetOpts train_ds;
  TrainOpts train_tr;
  std::string train_out = "out", train_cache;
  int train_workers = default_workers();
  add_filterbank_options(train_cmd, train_fb);
  add_envelope_options(train_cmd, train_env);
  add_dataset_options(train_cmd, train_ds);
  add_train_options(train_cmd, train_tr);
  train_cmd->add_option("--out", train_out, "output directory");
  train_cmd->add_option("--workers", train_workers, "feature-extraction worker count");
  train_cmd->add_option("--cache-dir", train_cache, "feature cache directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  FilterbankOpts eval_fb;
  EnvelopeOpts eval_env;
  DatasetOpts eval_ds;
  std::string eval_model, eval_out = "out", eval_cache;
  int eval_workers = default_workers();
  add_filterbank_options(eval_cmd, eval_fb);
  add_envelope_options(eval_cmd, eval_env);
  add_dataset_options(eval_cmd, eval_ds);
  eval_cmd->add_option("--model", eval_model, "model checkpoint path")->required();
  eval_cmd->add_option("--out", eval_out, "output directory");
  eval_cmd->add_option("--workers", eval_workers, "feature-extraction worker count");
  eval_cmd->add_option("--cache-dir", eval_cache, "feature cache directory");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "accuracy vs one filterbank parameter");
  FilterbankOpts sweep_fb;
  EnvelopeOpts sweep_env;
  DatasetOpts sweep_ds;
  TrainOpts sweep_tr;
  std::string sweep_param, sweep_out = "out", sweep_cache;
  std::vector<double> sweep_values;
  std::optional<int> sweep_trials;
  int sweep_workers = default_workers();
  add_filterbank_options(sweep_cmd, sweep_fb);
  add_envelope_options(sweep_cmd, sweep_env);
  add_dataset_options(sweep_cmd, sweep_ds);
  add_train_options(sweep_cmd, sweep_tr);
  sweep_cmd->add_option("--param", sweep_param, "swept parameter: n_filters, f_max or q");
  sweep_cmd->add_option("--values", sweep_values,
                        "explicit sweep values (default: the standard grid)");
  sweep_cmd->add_option("--trials", sweep_trials, "trials per sweep point (default 3)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");
  sweep_cmd->add_option("--workers", sweep_workers, "worker count");
  sweep_cmd->add_option("--cache-dir", sweep_cache, "feature cache directory");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "head-to-head config comparison");
  EnvelopeOpts compare_env;
  DatasetOpts compare_ds;
  TrainOpts compare_tr;
  std::string compare_a = "typical", compare_b = "tiny";
  std::string compare_out = "out", compare_cache;
  int compare_trials = 5, compare_workers = default_workers();
  add_envelope_options(compare_cmd, compare_env);
  add_dataset_options(compare_cmd, compare_ds);
  add_train_options(compare_cmd, compare_tr);
  compare_cmd->add_option("--a", compare_a, "config A: typical, tiny or N,FMAX,Q");
  compare_cmd->add_option("--b", compare_b, "config B");
  compare_cmd->add_option("--trials", compare_trials, "trials per config");
  compare_cmd->add_option("--out", compare_out, "output directory");
  compare_cmd->add_option("--workers", compare_workers, "worker count");
  compare_cmd->add_option("--cache-dir", compare_cache, "feature cache directory");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "re-render a sweep CSV as an SVG chart");
  std::string plot_csv, plot_out = "out";
  plot_cmd->add_option("--csv", plot_csv, "sweep results CSV")->required();
  plot_cmd->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::optional<afb::RunConfigFile> file;
    if (!config_path.empty()) {
      file = afb::RunConfigFile::parse_file(config_path);
    }
    const afb::RunConfigFile* file_ptr = file ? &*file : nullptr;

    if (design->parsed()) {
      return cmd_design(resolve_filterbank(design_fb, file_ptr));
    }
    if (power->parsed()) {
      return cmd_power(power_a, power_b);
    }
    if (extract->parsed()) {
      const afb::FilterbankConfig cfg = resolve_filterbank(extract_fb, file_ptr);
      return cmd_extract(cfg, resolve_envelope(extract_env, file_ptr, cfg.sample_rate_hz),
                         extract_wav, extract_out, extract_svg);
    }
    if (splits_cmd->parsed()) {
      return cmd_splits(splits_ds, file_ptr, splits_out);
    }
    if (train_cmd->parsed()) {
      const afb::FilterbankConfig cfg = resolve_filterbank(train_fb, file_ptr);
      return cmd_train(cfg, resolve_envelope(train_env, file_ptr, cfg.sample_rate_hz),
                       train_ds, train_tr, file_ptr, train_out, train_workers,
                       train_cache);
    }
    if (eval_cmd->parsed()) {
      const afb::FilterbankConfig cfg = resolve_filterbank(eval_fb, file_ptr);
      return cmd_eval(cfg, resolve_envelope(eval_env, file_ptr, cfg.sample_rate_hz),
                      eval_ds, file_ptr, eval_model, eval_out, eval_workers, eval_cache);
    }
    if (sweep_cmd->parsed()) {
      const afb::FilterbankConfig cfg = resolve_filterbank(sweep_fb, file_ptr);
      return cmd_sweep(sweep_param, sweep_values, sweep_trials, cfg,
                       resolve_envelope(sweep_env, file_ptr, cfg.sample_rate_hz), sweep_ds,
                       sweep_tr, file_ptr, sweep_out, sweep_workers, sweep_cache);
    }
    if (compare_cmd->parsed()) {
      afb::EnvelopeConfig env = resolve_envelope(compare_env, file_ptr, 16000.0);
      return cmd_compare(compare_a, compare_b, compare_trials, env, compare_ds,
                         compare_tr, file_ptr, compare_out, compare_workers,
                         compare_cache);
    }
    if (plot_cmd->parsed()) {
      return cmd_plot(plot_csv, plot_out);
    }
  } catch (const afb::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const afb::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
