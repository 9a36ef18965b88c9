// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exits with the number of failed criteria.
//
// The long end-to-end criterion builds a synthetic 35-word corpus in a
// temporary directory; pass --skip-e2e to omit it during development.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "afb/classifier.hpp"
#include "afb/dataset.hpp"
#include "afb/envelope.hpp"
#include "afb/experiments.hpp"
#include "afb/extractor.hpp"
#include "afb/filterbank.hpp"
#include "afb/power.hpp"
#include "support/synth_corpus.hpp"

namespace fs = std::filesystem;
using namespace afb;

namespace {

int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) {
    ++g_failures;
  }
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_power_exactness() {
  const double ratio = power_ratio(typical_config(), tiny_config());
  const double decomposed = 2.4 * 3.5 * 4.0;
  const bool ok = std::fabs(ratio - 33.6) <= 1e-9 && std::fabs(ratio - decomposed) <= 1e-9;
  std::ostringstream detail;
  detail << "power ratio typical/tiny = " << ratio << " (2.4 x 3.5 x 4 = " << decomposed
         << ")";
  report("1 (power-model exactness)", ok, detail.str());
}

void criterion_2_sweep_grid() {
  const std::array<SweepSpec, 3> sweeps = default_sweeps();
  const std::vector<double> n_values = {1, 2, 4, 6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 48, 64};
  const std::vector<double> f_values = {250,  500,  1000, 2000,  3000,  4000,  5000, 6000,
                                        7000, 8000, 9000, 10000, 12000, 16000, 20000};
  const std::vector<double> q_values = {0.2, 0.4, 0.6, 0.8, 1,  2,  3,  4, 6,
                                        8,   10,  15,  20,  25, 30, 40, 60};
  bool ok = sweeps[0].values == n_values && sweeps[1].values == f_values &&
            sweeps[2].values == q_values;
  std::size_t total = 0;
  for (const SweepSpec& s : sweeps) {
    total += s.values.size();
    ok = ok && s.base.n_filters == 24 && s.base.f_max_hz == 7000.0 &&
         s.base.q_filter == 8.0 && s.base.f_min_hz == 100.0;
  }
  ok = ok && total == 47;
  report("2 (sweep-grid fidelity)", ok,
         "47-point grid with typical base values (got " + std::to_string(total) + ")");
}

void criterion_3_filter_properties() {
  const double fs = 16000.0;
  bool ok = true;
  double worst_gain_err = 0.0, worst_q_err = 0.0;
  for (double f_c : {100.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0}) {
    for (double q : {0.5, 2.0, 8.0, 26.0}) {
      const BiquadCoeffs c = design_bandpass(f_c, q, fs);
      if (!c.active || !is_stable(c)) {
        ok = false;
        continue;
      }
      const double gain = std::abs(frequency_response(c, f_c, fs));
      worst_gain_err = std::max(worst_gain_err, std::fabs(gain - 1.0));
      if (std::fabs(gain - 1.0) > 1e-6) {
        ok = false;
      }
      const MeasuredBand band = measure_band(c, fs);
      const double rel = std::fabs(band.q - q) / q;
      worst_q_err = std::max(worst_q_err, rel);
      const double tolerance = f_c <= 2000.0 ? 0.05 : 0.15;
      if (rel > tolerance) {
        ok = false;
        std::printf("    (f_c=%.0f, Q=%.1f) measured Q %.4f, off by %.1f%%\n", f_c, q,
                    band.q, 100.0 * rel);
      }
    }
  }
  std::ostringstream detail;
  detail << "unity-gain error <= " << worst_gain_err << ", worst measured-Q error "
         << pct(worst_q_err);
  report("3 (filter property suite)", ok, detail.str());
}

void criterion_4_framing_and_shapes() {
  const EnvelopeConfig env;
  const int frames = frame_count(16000, env);
  Waveform clip;
  clip.samples.assign(kClipSamples, 0.0);
  for (int i = 0; i < kClipSamples; ++i) {
    clip.samples[static_cast<std::size_t>(i)] =
        0.3 * std::sin(2.0 * std::numbers::pi * 500.0 * i / 16000.0);
  }
  const Spectrogram s = extract_spectrogram(make_filterbank(typical_config()), env, clip);
  const bool ok = frames == 99 && s.n_channels == 24 && s.n_frames == 99;
  report("4 (framing and shapes)", ok,
         "99 frames per second, typical spectrogram " + std::to_string(s.n_channels) +
             "x" + std::to_string(s.n_frames));
}

void criterion_5_dataset_counts() {
  const fs::path root = fs::temp_directory_path() / "afb_acceptance_stub_corpus";
  fs::remove_all(root);
  testing::make_stub_corpus(root, 6000, 960);

  bool ok = true;
  std::string detail;
  try {
    const DatasetSplits small = build_splits(root, SplitPreset::kSmall, 9);
    ok = ok && small.train.size() == 2800 && small.validation.size() == 2800 &&
         small.test.size() == 2800;
    for (int s = 0; s < 3 && ok; ++s) {
      for (int k = 0; k < 10; ++k) {
        ok = ok && small.per_class_counts[static_cast<std::size_t>(s)]
                                         [static_cast<std::size_t>(k)] == 200;
      }
      ok = ok && small.per_class_counts[static_cast<std::size_t>(s)][kUnknownClass] == 800;
    }
    std::set<std::string> seen;
    for (const auto* split : {&small.train, &small.validation, &small.test}) {
      for (const Example& e : *split) {
        ok = ok && seen.insert(e.path).second;
      }
    }

    const DatasetSplits large = build_splits(root, SplitPreset::kLarge, 9);
    ok = ok && large.train.size() == 28000;

    std::ostringstream m1, m2;
    write_manifest_csv(small, m1);
    write_manifest_csv(build_splits(root, SplitPreset::kSmall, 9), m2);
    ok = ok && m1.str() == m2.str();

    detail = "small " + std::to_string(small.train.size()) + "/" +
             std::to_string(small.validation.size()) + "/" +
             std::to_string(small.test.size()) + " disjoint, large train " +
             std::to_string(large.train.size()) + ", manifests byte-identical";
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  fs::remove_all(root);
  report("5 (dataset counts)", ok, detail);
}

Spectrogram random_spectrogram(int channels, int frames, SplitMix64& rng) {
  Spectrogram s;
  s.n_channels = channels;
  s.n_frames = frames;
  s.values.resize(static_cast<std::size_t>(channels) * frames);
  for (float& v : s.values) {
    v = static_cast<float>(testing::gaussian(rng));
  }
  return s;
}

void criterion_6_gradient_oracle() {
  const double step = 1e-5;
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    SplitMix64 rng(seed * 1000 + 5);
    SmallNet model = init_model(seed, 3, 5);
    std::vector<Sample> batch(2);
    for (Sample& s : batch) {
      s.features = random_spectrogram(6, 9, rng);
      s.label = static_cast<int>(rng.below(kNumClasses));
    }

    Gradients grads;
    loss_and_gradients(model, batch, 0.001, grads);

    std::vector<double>* params[6] = {&model.conv1_w, &model.conv1_b, &model.conv2_w,
                                      &model.conv2_b, &model.fc_w,    &model.fc_b};
    const std::vector<double>* analytic[6] = {&grads.conv1_w, &grads.conv1_b,
                                              &grads.conv2_w, &grads.conv2_b,
                                              &grads.fc_w,    &grads.fc_b};
    for (int a = 0; a < 6; ++a) {
      for (std::size_t i = 0; i < params[a]->size(); ++i) {
        double& w = (*params[a])[i];
        const double saved = w;
        Gradients scratch;
        w = saved + step;
        const double up = loss_and_gradients(model, batch, 0.001, scratch);
        w = saved - step;
        const double down = loss_and_gradients(model, batch, 0.001, scratch);
        w = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double g = (*analytic[a])[i];
        const double rel =
            std::fabs(g - numeric) / std::max({1e-4, std::fabs(g), std::fabs(numeric)});
        worst = std::max(worst, rel);
      }
    }
  }
  ok = worst < 1e-4;
  std::ostringstream detail;
  detail << "max relative gradient error " << worst << " across 3 seeds";
  report("6 (gradient oracle)", ok, detail.str());
}

void criterion_7_baseline_sanity() {
  SplitMix64 rng(404);
  std::vector<Sample> balanced;
  for (int k = 0; k < kNumClasses; ++k) {
    for (int i = 0; i < 100; ++i) {
      Sample s;
      s.features = random_spectrogram(24, 99, rng);
      s.label = k;
      balanced.push_back(std::move(s));
    }
  }
  const EvalResult result = evaluate(init_model(7), balanced);
  const bool ok = std::fabs(result.accuracy - 0.091) <= 0.05;
  report("7 (baseline sanity)", ok,
         "untrained accuracy " + pct(result.accuracy) + " on " +
             std::to_string(result.total) + " balanced examples (chance 9.1%)");
}

// Desk-scale training configuration: the default hyperparameters target the
// full-size presets and underfit a 700-example set (11 minibatches per epoch
// leave the convolution stack barely moved after 25 epochs), so the
// end-to-end runs train with small batches and more epochs at the same
// optimizer settings otherwise.
TrainConfig desk_train_config() {
  TrainConfig cfg;
  cfg.learning_rate = 0.08;
  cfg.batch_size = 4;
  cfg.lr_decay = 0.95;
  cfg.epochs = 80;
  return cfg;
}

void criterion_8_end_to_end_trends(int workers) {
  const fs::path root = fs::temp_directory_path() / "afb_acceptance_corpus";
  const fs::path cache = fs::temp_directory_path() / "afb_acceptance_cache";
  if (!fs::exists(root / "yes")) {
    std::printf("  .. synthesizing corpus under %s\n", root.string().c_str());
    std::fflush(stdout);
    fs::remove_all(root);
    testing::make_synth_corpus(root, 150, 2026);
  }
  const DatasetSplits splits = build_splits(root, SplitPreset::kDesk, 1);

  RunOptions options;
  options.workers = workers;
  options.cache_dir = cache;

  SweepSpec n_sweep;
  n_sweep.parameter = SweepParameter::kNFilters;
  n_sweep.values = {1, 16, 24};
  n_sweep.trials = 3;
  n_sweep.train = desk_train_config();
  n_sweep.base_seed = 42;
  std::printf("  .. n_filters sweep over {1, 16, 24}, 3 trials each\n");
  std::fflush(stdout);
  const SweepResult n_result = run_sweep(n_sweep, splits, options);
  const double acc_n1 = n_result.points[0].mean_accuracy;
  const double acc_n16 = n_result.points[1].mean_accuracy;
  const double acc_typical = n_result.points[2].mean_accuracy;

  SweepSpec f_sweep;
  f_sweep.parameter = SweepParameter::kFMax;
  f_sweep.values = {2000};
  f_sweep.trials = 3;
  f_sweep.train = desk_train_config();
  f_sweep.base_seed = 42;
  std::printf("  .. f_max point at 2 kHz, 3 trials\n");
  std::fflush(stdout);
  const SweepResult f_result = run_sweep(f_sweep, splits, options);
  const double acc_f2k = f_result.points[0].mean_accuracy;

  std::printf("  .. typical vs tiny comparison, 3 trials each\n");
  std::fflush(stdout);
  const ComparisonResult comparison =
      compare_configs(typical_config(), tiny_config(), 3, splits, EnvelopeConfig{},
                      desk_train_config(), 42, options);

  const bool ok_a = acc_typical >= 0.60 && (acc_typical - 0.091) >= 0.45;
  report("8a (typical accuracy)", ok_a,
         "typical " + pct(acc_typical) + " (needs >= 60% and >= 45 points over 9.1%)");

  const bool ok_b = (acc_n16 - acc_n1) >= 0.10;
  report("8b (filter-count trend)", ok_b,
         "N=16 " + pct(acc_n16) + " vs N=1 " + pct(acc_n1) + " (gap " +
             pct(acc_n16 - acc_n1) + ", needs >= 10 points)");

  const bool ok_c = std::fabs(acc_f2k - acc_typical) <= 0.05;
  report("8c (top-frequency trend)", ok_c,
         "f_max 2 kHz " + pct(acc_f2k) + " vs 7 kHz " + pct(acc_typical) +
             " (|delta| " + pct(std::fabs(acc_f2k - acc_typical)) +
             ", needs <= 5 points)");

  const bool ok_d = std::fabs(comparison.accuracy_delta) <= 0.06;
  report("8d (typical vs tiny)", ok_d,
         "typical " + pct(comparison.a.mean_accuracy) + " vs tiny " +
             pct(comparison.b.mean_accuracy) + " (|delta| " +
             pct(std::fabs(comparison.accuracy_delta)) + ", needs <= 6 points)");
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_e2e = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--skip-e2e") == 0) {
      skip_e2e = true;
    }
  }

  criterion_1_power_exactness();
  criterion_2_sweep_grid();
  criterion_3_filter_properties();
  criterion_4_framing_and_shapes();
  criterion_5_dataset_counts();
  criterion_6_gradient_oracle();
  criterion_7_baseline_sanity();

  if (skip_e2e) {
    std::printf("[SKIP] criterion 8: end-to-end trends (--skip-e2e)\n");
  } else {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = std::min(4, hw == 0 ? 1 : static_cast<int>(hw));
    criterion_8_end_to_end_trends(workers);
  }

  std::printf(
      "[NOTE] criterion 9: the original study's absolute accuracies (94.2%% / 92.4%% "
      "on 28,000 training examples) depend on its residual backbone and are recorded, "
      "not gated, at this scale; see README for the full-corpus preset.\n");

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criterion(s) failed\n", g_failures);
  }
  return g_failures;
}
