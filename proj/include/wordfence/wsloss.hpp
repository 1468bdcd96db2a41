#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wordfence/error.hpp"
#include "wordfence/grid.hpp"
#include "wordfence/labelgen.hpp"

// Pixelwise weighted softmax loss. Every pixel contributes the negative
// log-probability of its ground-truth class, scaled by the inverse of that
// class's pixel count in the same image:
//
//   loss      = -sum_p (1/n_gt(p)) * log softmax(logits_p)[gt(p)]
//   grad_p[c] = (1/n_gt(p)) * (softmax(logits_p)[c] - [c == gt(p)])
//
// Counts are taken per image, on the fly, over non-ignored pixels. Classes
// absent from the image get weight 0, and ignored pixels contribute nothing
// to counts, loss, or gradient. Each present class therefore carries total
// weight 1 regardless of its pixel count, which keeps the loss invariant
// under class imbalance and under tiling the image.

namespace wf {

struct ClassWeights {
  std::vector<double> weights;      // 1/n_c for present classes, else 0
  std::vector<std::size_t> counts;  // n_c over non-ignored pixels
  int present = 0;                  // number of classes with n_c > 0
};

inline ClassWeights compute_class_weights(const LabelMap& labels, int num_classes = kNumClasses) {
  if (labels.classes.empty() || !labels.classes.same_dims(labels.ignore_mask))
    throw InvalidInput("compute_class_weights: label map and ignore mask dimensions differ");
  if (num_classes < 1) throw InvalidInput("compute_class_weights: need at least one class");
  ClassWeights cw;
  cw.counts.assign(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < labels.classes.size(); ++i) {
    if (labels.ignore_mask.data()[i]) continue;
    const std::uint8_t c = labels.classes.data()[i];
    if (c >= num_classes) throw InvalidInput("compute_class_weights: class value out of range");
    ++cw.counts[c];
  }
  cw.weights.assign(static_cast<std::size_t>(num_classes), 0.0);
  for (int c = 0; c < num_classes; ++c) {
    if (cw.counts[c] > 0) {
      cw.weights[c] = 1.0 / static_cast<double>(cw.counts[c]);
      ++cw.present;
    }
  }
  return cw;
}

struct LossOutput {
  double loss = 0.0;
  GridF grad;  // same dims and channels as the logits
};

inline LossOutput weighted_softmax_loss(const GridF& logits, const LabelMap& labels) {
  if (logits.empty()) throw InvalidInput("weighted_softmax_loss: empty logits");
  if (logits.height() != labels.height() || logits.width() != labels.width())
    throw InvalidInput("weighted_softmax_loss: logits and labels dimensions differ");
  const int c = logits.channels();
  const ClassWeights cw = compute_class_weights(labels, c);
  if (cw.present == 0)
    throw DegenerateInput("weighted_softmax_loss: label map has no non-ignored pixels");

  LossOutput out;
  out.grad = GridF(logits.height(), logits.width(), c);
  const double* in = logits.data().data();
  double* gv = out.grad.data().data();
  const std::size_t pixels = logits.size() / c;
  std::vector<double> ex(static_cast<std::size_t>(c));
  for (std::size_t p = 0; p < pixels; ++p) {
    if (labels.ignore_mask.data()[p]) continue;  // gradient stays zero
    const double* px = in + p * c;
    const int gt = labels.classes.data()[p];
    double m = px[0];
    for (int i = 0; i < c; ++i) {
      if (!std::isfinite(px[i])) throw InvalidInput("weighted_softmax_loss: non-finite logit");
      m = std::max(m, px[i]);
    }
    double denom = 0.0;
    for (int i = 0; i < c; ++i) {
      ex[i] = std::exp(px[i] - m);
      denom += ex[i];
    }
    const double w = cw.weights[gt];
    out.loss -= w * (px[gt] - m - std::log(denom));
    double* gp = gv + p * c;
    for (int i = 0; i < c; ++i) gp[i] = w * (ex[i] / denom - (i == gt ? 1.0 : 0.0));
  }
  return out;
}

}  // namespace wf
