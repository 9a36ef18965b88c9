// Desk-scale convolutional classifier and trainer. Two 3x3 conv layers with
// ReLU, a 2x2 average pool between them, global average pooling and a linear
// layer into an 11-way softmax. Global pooling makes the net shape-agnostic,
// so one architecture serves every filterbank sweep point (including a
// single-channel bank). All math is double precision and fully deterministic
// given the seed.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "afb/errors.hpp"
#include "afb/extractor.hpp"

namespace afb {

struct SmallNet {
  int conv1_channels = 16;
  int conv2_channels = 32;
  int num_classes = kNumClasses;

  // 3x3 kernels, row-major [out][in][ky][kx]; fc row-major [class][feature].
  std::vector<double> conv1_w, conv1_b;
  std::vector<double> conv2_w, conv2_b;
  std::vector<double> fc_w, fc_b;

  std::size_t parameter_count() const;
};

/// Fan-in-scaled uniform initialization, biases zero, deterministic per seed.
SmallNet init_model(std::uint64_t seed, int conv1_channels = 16,
                    int conv2_channels = 32);

struct TrainConfig {
  double momentum = 0.9;
  double learning_rate = 0.05;
  double lr_decay = 0.9;  // multiplied onto the rate after each epoch
  int epochs = 25;
  int batch_size = 64;
  double l2 = 0.001;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The training hyperparameters reported for the original backbone
/// (learning rate 1.0); the default config keeps 0.05, which is stable on
/// this smaller network.
TrainConfig paper_train_config();

/// One labeled feature matrix.
struct Sample {
  Spectrogram features;
  int label = 0;
};

/// Softmax probabilities for one input.
std::vector<double> forward(const SmallNet& model, const Spectrogram& input);

/// Numerically stable softmax; exposed for tests of its identities.
std::vector<double> softmax(std::span<const double> logits);

struct Gradients {
  std::vector<double> conv1_w, conv1_b;
  std::vector<double> conv2_w, conv2_b;
  std::vector<double> fc_w, fc_b;
};

/// Mean cross-entropy over the batch plus (l2/2) * sum of squared weights
/// (biases excluded). Gradients cover every parameter. Accumulation order is
/// fixed, so results are bit-identical run to run. Optionally reports how
/// many batch examples the current model classifies correctly.
double loss_and_gradients(const SmallNet& model, std::span<const Sample> batch,
                          double l2, Gradients& grads, int* correct = nullptr);

struct EpochStats {
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double learning_rate = 0.0;
};

/// SGD with classical momentum; minibatch order reshuffled per epoch from a
/// seed derived from (config.seed, epoch); the learning rate decays after
/// each epoch. Throws TrainingDivergedError on a non-finite loss.
std::vector<EpochStats> train(SmallNet& model, std::span<const Sample> trainset,
                              const TrainConfig& config);

struct EvalResult {
  double accuracy = 0.0;
  int total = 0;
  // confusion[true_class][predicted_class]
  std::array<std::array<int, kNumClasses>, kNumClasses> confusion{};
};

/// Argmax prediction per example, ties broken toward the lowest class index.
EvalResult evaluate(const SmallNet& model, std::span<const Sample> testset);

/// Student-t two-sided confidence interval: mean +- t(1-alpha/2, n-1) s/sqrt(n)
/// with the sample standard deviation. Requires n >= 2.
std::pair<double, double> confidence_interval(std::span<const double> values,
                                              double level = 0.95);

/// Quantile of Student's t distribution (inverse CDF), used by
/// confidence_interval; exposed for direct verification.
double student_t_quantile(double p, int dof);

// Checkpoint container: magic "AFBM", u32 version, u32 conv1/conv2/class
// dims, then 32-bit little-endian floats in declared parameter order.
void save_model(const SmallNet& model, const std::filesystem::path& path);
SmallNet load_model(const std::filesystem::path& path);

}  // namespace afb
