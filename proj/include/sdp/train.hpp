#pragma once

/*! \file
 *  \brief Mini-batch training of the pointer scorer.
 *
 *  Gradients of the per-sentence joint loss are averaged over a batch,
 *  clipped by global L2 norm and applied with Adam. The learning rate is
 *  multiplied by `decay_rate` whenever dev LF1 has not improved for
 *  `decay_patience` consecutive epochs. The returned model is the epoch with
 *  the best dev LF1, or the last epoch without a dev set. Everything runs on
 *  one thread from a single seeded generator, so runs are reproducible.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdp/decoder.hpp"
#include "sdp/eval.hpp"
#include "sdp/scorer.hpp"

namespace sdp {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Adam {
 public:
  Adam(std::span<const Parameter> params, double beta1, double beta2, double epsilon)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }

  /// Bias-corrected update; entries of `grads` may be empty (no gradient).
  void step(std::span<Parameter> params, std::span<const Matrix> grads, double learning_rate) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (grads[k].size() == 0) {
        m_[k] *= beta1_;
        v_[k] *= beta2_;
      } else {
        m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grads[k];
        v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grads[k].cwiseAbs2();
      }
      if (learning_rate == 0.0) continue;
      params[k].value.array() -=
          learning_rate * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + epsilon_);
    }
  }

 private:
  double beta1_, beta2_, epsilon_;
  std::vector<Matrix> m_, v_;
  long t_ = 0;
};

/// Scales gradients in place so that their joint L2 norm is at most `limit`.
/// Returns the norm before clipping.
inline double clip_global_norm(std::span<Matrix> grads, double limit) {
  double sq = 0;
  for (const auto& g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > limit) {
    for (auto& g : grads) g *= limit / norm;
  }
  return norm;
}

/// One vector per token for every sentence of a corpus.
using CorpusVectors = std::vector<std::vector<Vector>>;

struct EpochMetrics {
  int epoch = 0;
  double loss = 0;  ///< mean joint loss per sentence, in training mode
  std::optional<double> dev_lf1;
  double learning_rate = 0;
};

struct TrainOptions {
  const Corpus* dev = nullptr;
  const CorpusVectors* train_external = nullptr;
  const CorpusVectors* dev_external = nullptr;
  std::function<void(const EpochMetrics&)> on_epoch;
  /// Stop once dev LF1 reaches this value.
  std::optional<double> target_lf1;
};

struct TrainResult {
  PointerModel model;
  std::vector<EpochMetrics> history;
  int best_epoch = 0;
};

inline double corpus_lf1(const PointerModel& model, const Corpus& corpus, std::size_t beam,
                         const CorpusVectors* external = nullptr) {
  std::vector<Sentence> sentences;
  sentences.reserve(corpus.size());
  for (const auto& g : corpus) sentences.push_back(g.sentence());
  const std::span<const std::vector<Vector>> ext =
      external ? std::span<const std::vector<Vector>>(*external) : std::span<const std::vector<Vector>>{};
  const auto decoded = parse_corpus(model, sentences, beam, ext);
  Corpus pred;
  pred.reserve(decoded.size());
  for (const auto& d : decoded) pred.push_back(d.graph);
  return evaluate(pred, corpus).lf1;
}

inline TrainResult train(const Corpus& corpus, const ModelConfig& config, const TrainOptions& options = {}) {
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  config.validate();
  if (options.train_external && options.train_external->size() != corpus.size()) {
    throw ShapeError("external vectors do not align with the training corpus");
  }
  PointerModel model(config, build_vocabularies(corpus));
  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  Adam adam(model.parameters(), config.beta1, config.beta2, config.adam_epsilon);

  TrainResult result{model, {}, 0};
  double best_lf1 = -1.0;
  int stale = 0;
  double lr = config.learning_rate;
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t nparams = model.parameters().size();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<Matrix> grads(nparams);
      for (std::size_t b = start; b < end; ++b) {
        const auto& g = corpus[order[b]];
        const std::span<const Vector> ext =
            options.train_external ? std::span<const Vector>((*options.train_external)[order[b]])
                                   : std::span<const Vector>{};
        Tape tape(nparams);
        const SentenceLoss loss = sentence_loss(model, tape, g, ext, ForwardOptions{true, &rng});
        const double value = tape.scalar(loss.total);
        if (!std::isfinite(value)) {
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", sentence " +
                             std::to_string(order[b] + 1));
        }
        epoch_loss += value;
        tape.backward(loss.total);
        for (std::size_t k = 0; k < nparams; ++k) {
          const Matrix& pg = tape.parameter_grad(model.param(k));
          if (pg.size() == 0) continue;
          if (grads[k].size() == 0) {
            grads[k] = pg;
          } else {
            grads[k] += pg;
          }
        }
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads) g *= scale;
      clip_global_norm(grads, config.gradient_clip);
      adam.step(model.parameters(), grads, lr);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.loss = epoch_loss / static_cast<double>(corpus.size());
    metrics.learning_rate = lr;
    if (options.dev) {
      metrics.dev_lf1 = corpus_lf1(model, *options.dev, static_cast<std::size_t>(config.dev_beam_size),
                                   options.dev_external);
      if (*metrics.dev_lf1 > best_lf1) {
        best_lf1 = *metrics.dev_lf1;
        result.model = model;
        result.best_epoch = epoch;
        stale = 0;
      } else if (++stale >= config.decay_patience) {
        lr *= config.decay_rate;
        stale = 0;
      }
    }
    result.history.push_back(metrics);
    if (options.on_epoch) options.on_epoch(metrics);
    if (options.target_lf1 && metrics.dev_lf1 && *metrics.dev_lf1 >= *options.target_lf1) break;
  }
  if (!options.dev) {
    result.model = model;
    result.best_epoch = config.epochs;
  }
  return result;
}

}  // namespace sdp
