#include "afb/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "afb/rng.hpp"

namespace afb {

std::size_t SmallNet::parameter_count() const {
  return conv1_w.size() + conv1_b.size() + conv2_w.size() + conv2_b.size() +
         fc_w.size() + fc_b.size();
}

SmallNet init_model(std::uint64_t seed, int conv1_channels, int conv2_channels) {
  if (conv1_channels < 1 || conv2_channels < 1) {
    throw ArgumentError("conv channel counts must be >= 1");
  }
  SmallNet m;
  m.conv1_channels = conv1_channels;
  m.conv2_channels = conv2_channels;
  m.conv1_w.resize(static_cast<std::size_t>(conv1_channels) * 1 * 9);
  m.conv1_b.assign(static_cast<std::size_t>(conv1_channels), 0.0);
  m.conv2_w.resize(static_cast<std::size_t>(conv2_channels) * conv1_channels * 9);
  m.conv2_b.assign(static_cast<std::size_t>(conv2_channels), 0.0);
  m.fc_w.resize(static_cast<std::size_t>(m.num_classes) * conv2_channels);
  m.fc_b.assign(static_cast<std::size_t>(m.num_classes), 0.0);

  SplitMix64 rng(seed);
  auto fill_uniform = [&rng](std::vector<double>& w, double limit) {
    for (double& v : w) {
      v = rng.uniform(-limit, limit);
    }
  };
  fill_uniform(m.conv1_w, std::sqrt(6.0 / 9.0));
  fill_uniform(m.conv2_w, std::sqrt(6.0 / (9.0 * conv1_channels)));
  // Half-scale head: with zero biases and global pooling this keeps a fresh
  // model's class probabilities near uniform on any input.
  fill_uniform(m.fc_w, 0.5 * std::sqrt(6.0 / (conv2_channels + m.num_classes)));
  return m;
}

void TrainConfig::validate() const {
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1), got " + std::to_string(momentum));
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw ConfigError("lr_decay must lie in (0, 1], got " + std::to_string(lr_decay));
  }
  if (epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (!(l2 >= 0.0)) {
    throw ConfigError("l2 must be non-negative");
  }
}

TrainConfig paper_train_config() {
  TrainConfig c;
  c.learning_rate = 1.0;
  return c;
}

namespace {

// Activation buffers for one example, reused across the batch.
struct Workspace {
  int rows = 0, cols = 0;        // input plane
  int prows = 0, pcols = 0;      // after the 2x2 pool
  std::vector<double> input;     // rows*cols
  std::vector<double> act1;      // c1*rows*cols, post-ReLU
  std::vector<double> pooled;    // c1*prows*pcols
  std::vector<double> act2;      // c2*prows*pcols, post-ReLU
  std::vector<double> glob;      // c2
  std::vector<double> logits;    // classes
  std::vector<double> probs;     // classes
  // gradients flowing backward, same shapes
  std::vector<double> d_act1, d_pooled, d_act2, d_glob, d_logits;
};

// out[oc][y][x] += sum_ic sum_k w[oc][ic][ky][kx] * in[ic][y+ky-1][x+kx-1],
// zero padded. Planes are rows x cols, row-major.
void conv3x3_forward(const double* in, int in_ch, int rows, int cols,
                     const double* w, const double* bias, int out_ch, double* out) {
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (int oc = 0; oc < out_ch; ++oc) {
    std::fill(out + oc * plane, out + (oc + 1) * plane, bias[oc]);
  }
  for (int oc = 0; oc < out_ch; ++oc) {
    for (int ic = 0; ic < in_ch; ++ic) {
      const double* kernel = w + (static_cast<std::size_t>(oc) * in_ch + ic) * 9;
      const double* src_plane = in + ic * plane;
      double* dst_plane = out + oc * plane;
      for (int ky = 0; ky < 3; ++ky) {
        const int sy = ky - 1;
        const int y0 = std::max(0, -sy);
        const int y1 = std::min(rows, rows - sy);
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = kernel[ky * 3 + kx];
          const int sx = kx - 1;
          const int x0 = std::max(0, -sx);
          const int x1 = std::min(cols, cols - sx);
          for (int y = y0; y < y1; ++y) {
            const double* src = src_plane + static_cast<std::size_t>(y + sy) * cols + sx;
            double* dst = dst_plane + static_cast<std::size_t>(y) * cols;
            for (int x = x0; x < x1; ++x) {
              dst[x] += wv * src[x];
            }
          }
        }
      }
    }
  }
}

// Backward pass of the same convolution: input gradient, weight and bias
// gradients (accumulated into d_w/d_b).
void conv3x3_backward(const double* in, int in_ch, int rows, int cols, const double* w,
                      int out_ch, const double* d_out, double* d_in, double* d_w,
                      double* d_b) {
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  if (d_in != nullptr) {
    std::fill(d_in, d_in + in_ch * plane, 0.0);
  }
  for (int oc = 0; oc < out_ch; ++oc) {
    const double* dout_plane = d_out + oc * plane;
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      acc += dout_plane[i];
    }
    d_b[oc] += acc;
    for (int ic = 0; ic < in_ch; ++ic) {
      const double* src_plane = in + ic * plane;
      double* din_plane = d_in == nullptr ? nullptr : d_in + ic * plane;
      const double* kernel = w + (static_cast<std::size_t>(oc) * in_ch + ic) * 9;
      double* kernel_grad = d_w + (static_cast<std::size_t>(oc) * in_ch + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int sy = ky - 1;
        const int y0 = std::max(0, -sy);
        const int y1 = std::min(rows, rows - sy);
        for (int kx = 0; kx < 3; ++kx) {
          const int sx = kx - 1;
          const int x0 = std::max(0, -sx);
          const int x1 = std::min(cols, cols - sx);
          const double wv = kernel[ky * 3 + kx];
          double wg = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* src = src_plane + static_cast<std::size_t>(y + sy) * cols + sx;
            const double* dd = dout_plane + static_cast<std::size_t>(y) * cols;
            for (int x = x0; x < x1; ++x) {
              wg += dd[x] * src[x];
            }
            if (din_plane != nullptr) {
              double* di = din_plane + static_cast<std::size_t>(y + sy) * cols + sx;
              for (int x = x0; x < x1; ++x) {
                di[x] += wv * dd[x];
              }
            }
          }
          kernel_grad[ky * 3 + kx] += wg;
        }
      }
    }
  }
}

// 2x2 average pool, stride 2. Edge windows that extend past the plane average
// over the cells that exist, so odd (and single-row) planes lose nothing.
void avgpool2x2_forward(const double* in, int channels, int rows, int cols,
                        double* out, int prows, int pcols) {
  for (int c = 0; c < channels; ++c) {
    const double* src = in + static_cast<std::size_t>(c) * rows * cols;
    double* dst = out + static_cast<std::size_t>(c) * prows * pcols;
    for (int py = 0; py < prows; ++py) {
      const int y0 = 2 * py;
      const int y1 = std::min(y0 + 2, rows);
      for (int px = 0; px < pcols; ++px) {
        const int x0 = 2 * px;
        const int x1 = std::min(x0 + 2, cols);
        double sum = 0.0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            sum += src[static_cast<std::size_t>(y) * cols + x];
          }
        }
        dst[static_cast<std::size_t>(py) * pcols + px] =
            sum / static_cast<double>((y1 - y0) * (x1 - x0));
      }
    }
  }
}

void avgpool2x2_backward(int channels, int rows, int cols, const double* d_out,
                         int prows, int pcols, double* d_in) {
  std::fill(d_in, d_in + static_cast<std::size_t>(channels) * rows * cols, 0.0);
  for (int c = 0; c < channels; ++c) {
    const double* dd = d_out + static_cast<std::size_t>(c) * prows * pcols;
    double* di = d_in + static_cast<std::size_t>(c) * rows * cols;
    for (int py = 0; py < prows; ++py) {
      const int y0 = 2 * py;
      const int y1 = std::min(y0 + 2, rows);
      for (int px = 0; px < pcols; ++px) {
        const int x0 = 2 * px;
        const int x1 = std::min(x0 + 2, cols);
        const double g = dd[static_cast<std::size_t>(py) * pcols + px] /
                         static_cast<double>((y1 - y0) * (x1 - x0));
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            di[static_cast<std::size_t>(y) * cols + x] += g;
          }
        }
      }
    }
  }
}

void relu_inplace(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = v[i] > 0.0 ? v[i] : 0.0;
  }
}

// d_pre = d_post where post > 0 (post-activation values double as the mask).
void relu_backward_inplace(const double* post, double* d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (post[i] <= 0.0) {
      d[i] = 0.0;
    }
  }
}

void forward_pass(const SmallNet& m, const Spectrogram& s, Workspace& ws) {
  if (s.n_channels < 1 || s.n_frames < 1) {
    throw ArgumentError("classifier input must have at least one row and column");
  }
  ws.rows = s.n_channels;
  ws.cols = s.n_frames;
  ws.prows = (ws.rows + 1) / 2;
  ws.pcols = (ws.cols + 1) / 2;
  const std::size_t plane = static_cast<std::size_t>(ws.rows) * ws.cols;
  const std::size_t pplane = static_cast<std::size_t>(ws.prows) * ws.pcols;
  const int c1 = m.conv1_channels, c2 = m.conv2_channels, k = m.num_classes;

  ws.input.resize(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    ws.input[i] = static_cast<double>(s.values[i]);
  }
  ws.act1.resize(c1 * plane);
  ws.pooled.resize(c1 * pplane);
  ws.act2.resize(c2 * pplane);
  ws.glob.assign(static_cast<std::size_t>(c2), 0.0);
  ws.logits.assign(static_cast<std::size_t>(k), 0.0);

  conv3x3_forward(ws.input.data(), 1, ws.rows, ws.cols, m.conv1_w.data(),
                  m.conv1_b.data(), c1, ws.act1.data());
  relu_inplace(ws.act1.data(), ws.act1.size());
  avgpool2x2_forward(ws.act1.data(), c1, ws.rows, ws.cols, ws.pooled.data(), ws.prows,
                     ws.pcols);
  conv3x3_forward(ws.pooled.data(), c1, ws.prows, ws.pcols, m.conv2_w.data(),
                  m.conv2_b.data(), c2, ws.act2.data());
  relu_inplace(ws.act2.data(), ws.act2.size());

  const double inv_cells = 1.0 / static_cast<double>(pplane);
  for (int c = 0; c < c2; ++c) {
    const double* p = ws.act2.data() + static_cast<std::size_t>(c) * pplane;
    double sum = 0.0;
    for (std::size_t i = 0; i < pplane; ++i) {
      sum += p[i];
    }
    ws.glob[static_cast<std::size_t>(c)] = sum * inv_cells;
  }
  for (int j = 0; j < k; ++j) {
    const double* wrow = m.fc_w.data() + static_cast<std::size_t>(j) * c2;
    double acc = m.fc_b[static_cast<std::size_t>(j)];
    for (int c = 0; c < c2; ++c) {
      acc += wrow[c] * ws.glob[static_cast<std::size_t>(c)];
    }
    ws.logits[static_cast<std::size_t>(j)] = acc;
  }
  ws.probs = softmax(ws.logits);
}

// Backpropagates d_logits (already scaled) through the net, accumulating
// parameter gradients.
void backward_pass(const SmallNet& m, Workspace& ws, Gradients& g) {
  const std::size_t plane = static_cast<std::size_t>(ws.rows) * ws.cols;
  const std::size_t pplane = static_cast<std::size_t>(ws.prows) * ws.pcols;
  const int c1 = m.conv1_channels, c2 = m.conv2_channels, k = m.num_classes;

  ws.d_glob.assign(static_cast<std::size_t>(c2), 0.0);
  for (int j = 0; j < k; ++j) {
    const double dj = ws.d_logits[static_cast<std::size_t>(j)];
    g.fc_b[static_cast<std::size_t>(j)] += dj;
    double* wg = g.fc_w.data() + static_cast<std::size_t>(j) * c2;
    const double* wrow = m.fc_w.data() + static_cast<std::size_t>(j) * c2;
    for (int c = 0; c < c2; ++c) {
      wg[c] += dj * ws.glob[static_cast<std::size_t>(c)];
      ws.d_glob[static_cast<std::size_t>(c)] += dj * wrow[c];
    }
  }

  ws.d_act2.resize(c2 * pplane);
  const double inv_cells = 1.0 / static_cast<double>(pplane);
  for (int c = 0; c < c2; ++c) {
    const double dv = ws.d_glob[static_cast<std::size_t>(c)] * inv_cells;
    double* p = ws.d_act2.data() + static_cast<std::size_t>(c) * pplane;
    std::fill(p, p + pplane, dv);
  }
  relu_backward_inplace(ws.act2.data(), ws.d_act2.data(), ws.d_act2.size());

  ws.d_pooled.resize(c1 * pplane);
  conv3x3_backward(ws.pooled.data(), c1, ws.prows, ws.pcols, m.conv2_w.data(), c2,
                   ws.d_act2.data(), ws.d_pooled.data(), g.conv2_w.data(),
                   g.conv2_b.data());

  ws.d_act1.resize(c1 * plane);
  avgpool2x2_backward(c1, ws.rows, ws.cols, ws.d_pooled.data(), ws.prows, ws.pcols,
                      ws.d_act1.data());
  relu_backward_inplace(ws.act1.data(), ws.d_act1.data(), ws.d_act1.size());

  conv3x3_backward(ws.input.data(), 1, ws.rows, ws.cols, m.conv1_w.data(), c1,
                   ws.d_act1.data(), nullptr, g.conv1_w.data(), g.conv1_b.data());
}

void zero_gradients(const SmallNet& m, Gradients& g) {
  g.conv1_w.assign(m.conv1_w.size(), 0.0);
  g.conv1_b.assign(m.conv1_b.size(), 0.0);
  g.conv2_w.assign(m.conv2_w.size(), 0.0);
  g.conv2_b.assign(m.conv2_b.size(), 0.0);
  g.fc_w.assign(m.fc_w.size(), 0.0);
  g.fc_b.assign(m.fc_b.size(), 0.0);
}

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  return best;
}

double loss_and_gradients_core(const SmallNet& model,
                               std::span<const Sample* const> batch, double l2,
                               Gradients& grads, int* correct) {
  if (batch.empty()) {
    throw ArgumentError("loss_and_gradients needs a non-empty batch");
  }
  zero_gradients(model, grads);
  Workspace ws;
  double loss = 0.0;
  int hits = 0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const Sample* sample : batch) {
    if (sample->label < 0 || sample->label >= model.num_classes) {
      throw ArgumentError("label " + std::to_string(sample->label) + " out of range");
    }
    forward_pass(model, sample->features, ws);

    const std::size_t y = static_cast<std::size_t>(sample->label);
    double max_logit = ws.logits[0];
    for (double v : ws.logits) {
      max_logit = std::max(max_logit, v);
    }
    double sum_exp = 0.0;
    for (double v : ws.logits) {
      sum_exp += std::exp(v - max_logit);
    }
    loss += (max_logit + std::log(sum_exp) - ws.logits[y]) * inv_n;
    if (argmax_lowest(ws.logits) == sample->label) {
      ++hits;
    }

    ws.d_logits = ws.probs;
    for (double& d : ws.d_logits) {
      d *= inv_n;
    }
    ws.d_logits[y] -= inv_n;
    backward_pass(model, ws, grads);
  }

  if (l2 > 0.0) {
    auto add_l2 = [l2, &loss](const std::vector<double>& w, std::vector<double>& g) {
      double sq = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        sq += w[i] * w[i];
        g[i] += l2 * w[i];
      }
      loss += 0.5 * l2 * sq;
    };
    add_l2(model.conv1_w, grads.conv1_w);
    add_l2(model.conv2_w, grads.conv2_w);
    add_l2(model.fc_w, grads.fc_w);
  }
  if (correct != nullptr) {
    *correct = hits;
  }
  return loss;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  double max_logit = logits[0];
  for (double v : logits) {
    max_logit = std::max(max_logit, v);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  for (double& v : out) {
    v /= sum;
  }
  return out;
}

std::vector<double> forward(const SmallNet& model, const Spectrogram& input) {
  Workspace ws;
  forward_pass(model, input, ws);
  return ws.probs;
}

double loss_and_gradients(const SmallNet& model, std::span<const Sample> batch,
                          double l2, Gradients& grads, int* correct) {
  std::vector<const Sample*> ptrs(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ptrs[i] = &batch[i];
  }
  return loss_and_gradients_core(model, ptrs, l2, grads, correct);
}

std::vector<EpochStats> train(SmallNet& model, std::span<const Sample> trainset,
                              const TrainConfig& config) {
  config.validate();
  if (trainset.empty()) {
    throw ArgumentError("train needs a non-empty training set");
  }

  Gradients grads, velocity;
  zero_gradients(model, grads);
  zero_gradients(model, velocity);

  std::vector<std::size_t> order(trainset.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const Sample*> batch;
  batch.reserve(static_cast<std::size_t>(config.batch_size));

  std::vector<EpochStats> history;
  history.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate * std::pow(config.lr_decay, epoch);
    SplitMix64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    deterministic_shuffle(order, rng);

    double loss_sum = 0.0;
    int correct_total = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&trainset[order[i]]);
      }
      int correct = 0;
      const double loss = loss_and_gradients_core(model, batch, config.l2, grads, &correct);
      if (!std::isfinite(loss)) {
        throw TrainingDivergedError(
            "training diverged (non-finite loss) at epoch " + std::to_string(epoch),
            epoch);
      }
      loss_sum += loss * static_cast<double>(batch.size());
      correct_total += correct;

      auto update = [lr, &config](std::vector<double>& w, std::vector<double>& v,
                                  const std::vector<double>& g) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          v[i] = config.momentum * v[i] + lr * g[i];
          w[i] -= v[i];
        }
      };
      update(model.conv1_w, velocity.conv1_w, grads.conv1_w);
      update(model.conv1_b, velocity.conv1_b, grads.conv1_b);
      update(model.conv2_w, velocity.conv2_w, grads.conv2_w);
      update(model.conv2_b, velocity.conv2_b, grads.conv2_b);
      update(model.fc_w, velocity.fc_w, grads.fc_w);
      update(model.fc_b, velocity.fc_b, grads.fc_b);
    }
    history.push_back(EpochStats{loss_sum / static_cast<double>(trainset.size()),
                                 static_cast<double>(correct_total) /
                                     static_cast<double>(trainset.size()),
                                 lr});
  }
  return history;
}

EvalResult evaluate(const SmallNet& model, std::span<const Sample> testset) {
  if (testset.empty()) {
    throw ArgumentError("evaluate needs a non-empty test set");
  }
  EvalResult result;
  result.total = static_cast<int>(testset.size());
  Workspace ws;
  int hits = 0;
  for (const Sample& sample : testset) {
    if (sample.label < 0 || sample.label >= model.num_classes) {
      throw ArgumentError("label " + std::to_string(sample.label) + " out of range");
    }
    forward_pass(model, sample.features, ws);
    const int pred = argmax_lowest(ws.probs);
    result.confusion[static_cast<std::size_t>(sample.label)]
                    [static_cast<std::size_t>(pred)] += 1;
    if (pred == sample.label) {
      ++hits;
    }
  }
  result.accuracy = static_cast<double>(hits) / static_cast<double>(result.total);
  return result;
}

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double betai(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int dof) {
  const double v = static_cast<double>(dof);
  const double tail = 0.5 * betai(v / 2.0, 0.5, v / (v + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

}  // namespace

double student_t_quantile(double p, int dof) {
  if (dof < 1) {
    throw ArgumentError("t quantile needs dof >= 1");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("t quantile needs p in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, dof);

  double hi = 1.0;
  while (student_t_cdf(hi, dof) < p && hi < 1e12) {
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, dof) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> confidence_interval(std::span<const double> values,
                                              double level) {
  if (values.size() < 2) {
    throw ArgumentError("confidence interval needs at least two values");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw ArgumentError("confidence level must lie in (0, 1)");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) {
    mean += v;
  }
  mean /= n;
  double sq = 0.0;
  for (double v : values) {
    sq += (v - mean) * (v - mean);
  }
  const double s = std::sqrt(sq / (n - 1.0));
  const double t =
      student_t_quantile(1.0 - (1.0 - level) / 2.0, static_cast<int>(values.size()) - 1);
  const double half = t * s / std::sqrt(n);
  return {mean - half, mean + half};
}

namespace {

constexpr char kModelMagic[4] = {'A', 'F', 'B', 'M'};
constexpr std::uint32_t kModelVersion = 1;

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
    throw ParseError("truncated model file");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_params(std::ostream& out, const std::vector<double>& w) {
  for (double v : w) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32le(out, bits);
  }
}

void read_params(std::istream& in, std::vector<double>& w) {
  for (double& v : w) {
    const std::uint32_t bits = read_u32le(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = static_cast<double>(f);
  }
}

}  // namespace

void save_model(const SmallNet& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot open '" + path.string() + "' for writing");
  }
  out.write(kModelMagic, 4);
  write_u32le(out, kModelVersion);
  write_u32le(out, static_cast<std::uint32_t>(model.conv1_channels));
  write_u32le(out, static_cast<std::uint32_t>(model.conv2_channels));
  write_u32le(out, static_cast<std::uint32_t>(model.num_classes));
  write_params(out, model.conv1_w);
  write_params(out, model.conv1_b);
  write_params(out, model.conv2_w);
  write_params(out, model.conv2_b);
  write_params(out, model.fc_w);
  write_params(out, model.fc_b);
}

SmallNet load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw ParseError("'" + path.string() + "' is not a model checkpoint");
  }
  const std::uint32_t version = read_u32le(in);
  if (version != kModelVersion) {
    throw ParseError("unsupported model version " + std::to_string(version));
  }
  const std::uint32_t c1 = read_u32le(in);
  const std::uint32_t c2 = read_u32le(in);
  const std::uint32_t classes = read_u32le(in);
  if (c1 == 0 || c2 == 0 || classes == 0 || c1 > 4096 || c2 > 4096 || classes > 4096) {
    throw ParseError("implausible model dimensions");
  }
  SmallNet m;
  m.conv1_channels = static_cast<int>(c1);
  m.conv2_channels = static_cast<int>(c2);
  m.num_classes = static_cast<int>(classes);
  m.conv1_w.resize(static_cast<std::size_t>(c1) * 9);
  m.conv1_b.resize(c1);
  m.conv2_w.resize(static_cast<std::size_t>(c2) * c1 * 9);
  m.conv2_b.resize(c2);
  m.fc_w.resize(static_cast<std::size_t>(classes) * c2);
  m.fc_b.resize(classes);
  read_params(in, m.conv1_w);
  read_params(in, m.conv1_b);
  read_params(in, m.conv2_w);
  read_params(in, m.conv2_b);
  read_params(in, m.fc_w);
  read_params(in, m.fc_b);
  return m;
}

}  // namespace afb
