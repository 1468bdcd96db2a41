#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/labelgen.hpp"
#include "wordfence/rng.hpp"
#include "wordfence/wsloss.hpp"

// A small dilated-convolution segmentation network with hand-written
// forward and backward passes, all in 64-bit arithmetic.
//
// Architecture: a three-layer 3x3 stride-1 trunk (1->16->16->16 channels,
// each convolution followed by rectification) feeding three parallel 3x3
// heads with dilations 1, 2 and 4 (16->3 channels each). The head outputs
// are fused by elementwise summation into the final logits, so each class
// score mixes evidence from three receptive-field sizes. All convolutions
// zero-pad to keep the spatial dimensions unchanged.

namespace wf {

inline constexpr int kTrunkDepth = 3;
inline constexpr int kTrunkWidth = 16;
inline constexpr int kNumHeads = 3;
inline constexpr std::array<int, kNumHeads> kHeadDilations{1, 2, 4};

struct ConvLayer {
  int kernel = 3;
  int dilation = 1;
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> weights;  // [ky][kx][ic][oc]
  std::vector<double> bias;     // [oc]

  static ConvLayer make(int kernel, int dilation, int in_channels, int out_channels) {
    ConvLayer l;
    l.kernel = kernel;
    l.dilation = dilation;
    l.in_channels = in_channels;
    l.out_channels = out_channels;
    l.weights.assign(static_cast<std::size_t>(kernel) * kernel * in_channels * out_channels, 0.0);
    l.bias.assign(static_cast<std::size_t>(out_channels), 0.0);
    return l;
  }

  // Zero padding that keeps output dims equal to input dims.
  int pad() const { return (kernel - 1) / 2 * dilation; }
  int receptive_radius() const { return (kernel - 1) / 2 * dilation; }

  double& w(int ky, int kx, int ic, int oc) {
    return weights[((static_cast<std::size_t>(ky) * kernel + kx) * in_channels + ic) * out_channels +
                   oc];
  }
  double w(int ky, int kx, int ic, int oc) const {
    return weights[((static_cast<std::size_t>(ky) * kernel + kx) * in_channels + ic) * out_channels +
                   oc];
  }

  void validate() const {
    if (kernel < 1 || kernel % 2 == 0) throw InvalidInput("ConvLayer: kernel must be odd");
    if (dilation < 1) throw InvalidInput("ConvLayer: dilation must be >= 1");
    if (in_channels < 1 || out_channels < 1) throw InvalidInput("ConvLayer: bad channel counts");
    if (weights.size() !=
            static_cast<std::size_t>(kernel) * kernel * in_channels * out_channels ||
        bias.size() != static_cast<std::size_t>(out_channels))
      throw InvalidInput("ConvLayer: weight storage does not match declared shape");
  }
};

// out(y, x, oc) = bias[oc] + sum_{ky,kx,ic} in(y + (ky-r)*d, x + (kx-r)*d, ic) * w(ky,kx,ic,oc)
// with r = (kernel-1)/2; taps outside the input read zero.
inline GridF dilated_conv2d(const GridF& input, const ConvLayer& layer) {
  layer.validate();
  if (input.channels() != layer.in_channels)
    throw InvalidInput("dilated_conv2d: input channel count does not match layer");
  const int h = input.height(), w = input.width();
  const int k = layer.kernel, d = layer.dilation, r = (k - 1) / 2;
  const int cin = layer.in_channels, cout = layer.out_channels;
  GridF out(h, w, cout);
  const double* iv = input.data().data();
  double* ov = out.data().data();
  const double* wv = layer.weights.data();
  std::vector<double> acc(static_cast<std::size_t>(cout));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int oc = 0; oc < cout; ++oc) acc[oc] = layer.bias[oc];
      for (int ky = 0; ky < k; ++ky) {
        const int yy = y + (ky - r) * d;
        if (yy < 0 || yy >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int xx = x + (kx - r) * d;
          if (xx < 0 || xx >= w) continue;
          const double* in_px = iv + (static_cast<std::size_t>(yy) * w + xx) * cin;
          const double* w_row = wv + (static_cast<std::size_t>(ky) * k + kx) * cin * cout;
          for (int ic = 0; ic < cin; ++ic) {
            const double v = in_px[ic];
            const double* wr = w_row + static_cast<std::size_t>(ic) * cout;
            for (int oc = 0; oc < cout; ++oc) acc[oc] += v * wr[oc];
          }
        }
      }
      double* out_px = ov + (static_cast<std::size_t>(y) * w + x) * cout;
      for (int oc = 0; oc < cout; ++oc) out_px[oc] = acc[oc];
    }
  }
  return out;
}

// Gradient of the convolution with respect to its input (transposed pass).
inline GridF conv2d_input_grad(const GridF& grad_out, const ConvLayer& layer) {
  layer.validate();
  if (grad_out.channels() != layer.out_channels)
    throw InvalidInput("conv2d_input_grad: gradient channel count does not match layer");
  const int h = grad_out.height(), w = grad_out.width();
  const int k = layer.kernel, d = layer.dilation, r = (k - 1) / 2;
  const int cin = layer.in_channels, cout = layer.out_channels;
  GridF gin(h, w, cin);
  const double* gv = grad_out.data().data();
  double* giv = gin.data().data();
  const double* wv = layer.weights.data();
  std::vector<double> acc(static_cast<std::size_t>(cin));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ic = 0; ic < cin; ++ic) acc[ic] = 0.0;
      for (int ky = 0; ky < k; ++ky) {
        const int yy = y - (ky - r) * d;
        if (yy < 0 || yy >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int xx = x - (kx - r) * d;
          if (xx < 0 || xx >= w) continue;
          const double* g_px = gv + (static_cast<std::size_t>(yy) * w + xx) * cout;
          const double* w_row = wv + (static_cast<std::size_t>(ky) * k + kx) * cin * cout;
          for (int ic = 0; ic < cin; ++ic) {
            const double* wr = w_row + static_cast<std::size_t>(ic) * cout;
            double s = 0.0;
            for (int oc = 0; oc < cout; ++oc) s += g_px[oc] * wr[oc];
            acc[ic] += s;
          }
        }
      }
      double* gi_px = giv + (static_cast<std::size_t>(y) * w + x) * cin;
      for (int ic = 0; ic < cin; ++ic) gi_px[ic] = acc[ic];
    }
  }
  return gin;
}

struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> bias;
};

inline void conv2d_param_grad(const GridF& input, const GridF& grad_out, const ConvLayer& layer,
                              LayerGrads& grads) {
  layer.validate();
  if (input.channels() != layer.in_channels || grad_out.channels() != layer.out_channels ||
      input.height() != grad_out.height() || input.width() != grad_out.width())
    throw InvalidInput("conv2d_param_grad: shape mismatch");
  const int h = input.height(), w = input.width();
  const int k = layer.kernel, d = layer.dilation, r = (k - 1) / 2;
  const int cin = layer.in_channels, cout = layer.out_channels;
  grads.weights.assign(layer.weights.size(), 0.0);
  grads.bias.assign(layer.bias.size(), 0.0);
  const double* iv = input.data().data();
  const double* gv = grad_out.data().data();
  for (int ky = 0; ky < k; ++ky) {
    const int dy = (ky - r) * d;
    const int y_lo = std::max(0, -dy), y_hi = std::min(h, h - dy);
    for (int kx = 0; kx < k; ++kx) {
      const int dx = (kx - r) * d;
      const int x_lo = std::max(0, -dx), x_hi = std::min(w, w - dx);
      double* wg_tap = grads.weights.data() + (static_cast<std::size_t>(ky) * k + kx) * cin * cout;
      for (int y = y_lo; y < y_hi; ++y) {
        for (int x = x_lo; x < x_hi; ++x) {
          const double* in_px = iv + (static_cast<std::size_t>(y + dy) * w + (x + dx)) * cin;
          const double* g_px = gv + (static_cast<std::size_t>(y) * w + x) * cout;
          for (int ic = 0; ic < cin; ++ic) {
            const double v = in_px[ic];
            double* wg = wg_tap + static_cast<std::size_t>(ic) * cout;
            for (int oc = 0; oc < cout; ++oc) wg[oc] += v * g_px[oc];
          }
        }
      }
    }
  }
  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* g_px = gv + p * cout;
    for (int oc = 0; oc < cout; ++oc) grads.bias[oc] += g_px[oc];
  }
}

// ---------------------------------------------------------------------------
// Network assembly.
// ---------------------------------------------------------------------------

struct NetworkParams {
  std::array<ConvLayer, kTrunkDepth> trunk;
  std::array<ConvLayer, kNumHeads> heads;

  // Correct shapes, all parameters zero.
  static NetworkParams architecture() {
    NetworkParams p;
    p.trunk[0] = ConvLayer::make(3, 1, 1, kTrunkWidth);
    p.trunk[1] = ConvLayer::make(3, 1, kTrunkWidth, kTrunkWidth);
    p.trunk[2] = ConvLayer::make(3, 1, kTrunkWidth, kTrunkWidth);
    for (int i = 0; i < kNumHeads; ++i)
      p.heads[i] = ConvLayer::make(3, kHeadDilations[i], kTrunkWidth, kNumClasses);
    return p;
  }

  static NetworkParams initialized(std::uint64_t seed, double scale = 0.1) {
    if (scale <= 0.0) throw InvalidInput("NetworkParams: init scale must be positive");
    NetworkParams p = architecture();
    Rng rng(seed);
    auto fill = [&](ConvLayer& l) {
      for (double& v : l.weights) v = rng.next_range(-scale, scale);
      for (double& v : l.bias) v = rng.next_range(-scale, scale);
    };
    for (ConvLayer& l : p.trunk) fill(l);
    for (ConvLayer& l : p.heads) fill(l);
    return p;
  }

  void validate() const {
    for (const ConvLayer& l : trunk) l.validate();
    for (const ConvLayer& l : heads) l.validate();
    if (trunk[0].in_channels != 1) throw InvalidInput("NetworkParams: trunk must take 1 channel");
    for (const ConvLayer& l : heads)
      if (l.in_channels != trunk[kTrunkDepth - 1].out_channels ||
          l.out_channels != kNumClasses)
        throw InvalidInput("NetworkParams: head shapes inconsistent with trunk");
  }
};

struct ForwardCache {
  GridF input;
  std::array<GridF, kTrunkDepth> pre;   // pre-activations
  std::array<GridF, kTrunkDepth> post;  // rectified outputs
  bool valid = false;
};

inline GridF relu(const GridF& z) {
  GridF a = z;
  for (double& v : a.data())
    if (v < 0.0) v = 0.0;
  return a;
}

inline GridF forward(const NetworkParams& params, const GridF& image,
                     ForwardCache* cache = nullptr) {
  params.validate();
  if (image.empty() || image.channels() != 1)
    throw InvalidInput("forward: expected a single-channel image");
  GridF act = image;
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.input = image;
  for (int i = 0; i < kTrunkDepth; ++i) {
    c.pre[i] = dilated_conv2d(act, params.trunk[i]);
    act = relu(c.pre[i]);
    c.post[i] = act;
  }
  GridF logits = dilated_conv2d(act, params.heads[0]);
  for (int i = 1; i < kNumHeads; ++i) {
    const GridF head_out = dilated_conv2d(act, params.heads[i]);
    for (std::size_t j = 0; j < logits.size(); ++j) logits.data()[j] += head_out.data()[j];
  }
  c.valid = true;
  return logits;
}

struct NetworkGrads {
  std::array<LayerGrads, kTrunkDepth> trunk;
  std::array<LayerGrads, kNumHeads> heads;
};

inline NetworkGrads backward(const NetworkParams& params, const ForwardCache& cache,
                             const GridF& grad_logits) {
  params.validate();
  if (!cache.valid) throw InvalidState("backward: cache was not produced by forward");
  const GridF& trunk_out = cache.post[kTrunkDepth - 1];
  if (grad_logits.height() != trunk_out.height() || grad_logits.width() != trunk_out.width() ||
      grad_logits.channels() != kNumClasses)
    throw InvalidState("backward: gradient dimensions do not match cached forward pass");
  if (cache.input.channels() != params.trunk[0].in_channels ||
      cache.post[0].channels() != params.trunk[0].out_channels)
    throw InvalidState("backward: cache does not match network parameters");

  NetworkGrads g;
  // Elementwise-sum fusion hands grad_logits unchanged to every head.
  GridF grad_act(trunk_out.height(), trunk_out.width(), trunk_out.channels());
  for (int i = 0; i < kNumHeads; ++i) {
    conv2d_param_grad(trunk_out, grad_logits, params.heads[i], g.heads[i]);
    const GridF gi = conv2d_input_grad(grad_logits, params.heads[i]);
    for (std::size_t j = 0; j < grad_act.size(); ++j) grad_act.data()[j] += gi.data()[j];
  }
  for (int i = kTrunkDepth - 1; i >= 0; --i) {
    // Rectifier gate: units with non-positive pre-activation get no gradient.
    GridF gz = grad_act;
    for (std::size_t j = 0; j < gz.size(); ++j)
      if (cache.pre[i].data()[j] <= 0.0) gz.data()[j] = 0.0;
    const GridF& layer_in = (i == 0) ? cache.input : cache.post[i - 1];
    conv2d_param_grad(layer_in, gz, params.trunk[i], g.trunk[i]);
    if (i > 0) grad_act = conv2d_input_grad(gz, params.trunk[i]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 10;
  int batch = 1;  // images accumulated per SGD step
  std::uint64_t seed = 0;
  double weight_init_scale = 0.1;

  void validate() const {
    if (learning_rate < 0.0) throw InvalidInput("TrainConfig: learning rate must be >= 0");
    if (epochs < 1 || batch < 1) throw InvalidInput("TrainConfig: epochs and batch must be >= 1");
    if (weight_init_scale <= 0.0) throw InvalidInput("TrainConfig: init scale must be positive");
  }
};

struct TrainSample {
  GridF image;
  LabelMap labels;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> epoch_mean_loss;
};

namespace detail {

inline void accumulate(NetworkGrads& into, const NetworkGrads& g) {
  auto add = [](LayerGrads& a, const LayerGrads& b) {
    if (a.weights.empty()) {
      a = b;
      return;
    }
    for (std::size_t i = 0; i < a.weights.size(); ++i) a.weights[i] += b.weights[i];
    for (std::size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += b.bias[i];
  };
  for (int i = 0; i < kTrunkDepth; ++i) add(into.trunk[i], g.trunk[i]);
  for (int i = 0; i < kNumHeads; ++i) add(into.heads[i], g.heads[i]);
}

inline void sgd_step(NetworkParams& params, const NetworkGrads& g, double lr) {
  auto step = [lr](ConvLayer& l, const LayerGrads& lg) {
    if (lg.weights.empty()) return;
    for (std::size_t i = 0; i < l.weights.size(); ++i) l.weights[i] -= lr * lg.weights[i];
    for (std::size_t i = 0; i < l.bias.size(); ++i) l.bias[i] -= lr * lg.bias[i];
  };
  for (int i = 0; i < kTrunkDepth; ++i) step(params.trunk[i], g.trunk[i]);
  for (int i = 0; i < kNumHeads; ++i) step(params.heads[i], g.heads[i]);
}

}  // namespace detail

// Plain SGD on the weighted softmax loss. Samples are visited in dataset
// order; with identical seed, dataset and config the result is bit-identical
// across runs.
inline TrainResult train(const std::vector<TrainSample>& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw InvalidInput("train: empty dataset");
  for (const TrainSample& s : dataset) {
    if (s.image.channels() != 1) throw InvalidInput("train: images must be single-channel");
    if (s.image.height() != s.labels.height() || s.image.width() != s.labels.width())
      throw InvalidInput("train: image and label dimensions differ");
  }

  TrainResult result;
  result.params = NetworkParams::initialized(config.seed, config.weight_init_scale);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    NetworkGrads pending;
    int pending_count = 0;
    for (const TrainSample& s : dataset) {
      ForwardCache cache;
      const GridF logits = forward(result.params, s.image, &cache);
      LossOutput lo = weighted_softmax_loss(logits, s.labels);
      loss_sum += lo.loss;
      detail::accumulate(pending, backward(result.params, cache, lo.grad));
      if (++pending_count == config.batch) {
        detail::sgd_step(result.params, pending, config.learning_rate);
        pending = NetworkGrads{};
        pending_count = 0;
      }
    }
    if (pending_count > 0) detail::sgd_step(result.params, pending, config.learning_rate);
    result.epoch_mean_loss.push_back(loss_sum / static_cast<double>(dataset.size()));
  }
  return result;
}

}  // namespace wf
