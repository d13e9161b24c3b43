#pragma once

// Deep clustering network training: autoencoder pre-training on shuffled meaning
// batches, sampled K-means initialisation of the sememe space, and joint
// fine-tuning of reconstruction + lambda * clustering loss.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sememe/attention.hpp"
#include "sememe/autoencoder.hpp"
#include "sememe/error.hpp"
#include "sememe/kmeans.hpp"
#include "sememe/rng.hpp"
#include "sememe/tensor.hpp"

namespace sememe {

struct TrainConfig {
  std::vector<std::size_t> layers{200, 200, 800, 10, 800, 200, 200};  // hidden widths, mirrored
  double lambda = 0.5;
  double learning_rate = 0.003;
  std::size_t batch_size = 64;
  std::size_t epochs = 12;           // autoencoder pre-training passes over all words
  std::size_t finetune_epochs = 3;
  std::size_t patience = 0;          // fine-tune early stop on epoch-mean L_c; 0 disables
  std::size_t clusters = 16;
  std::size_t loops = 10;            // sampling loops for the K-means initialisation
  std::size_t per_word_batches = 2;  // batches drawn per word per pass
  std::size_t shuffle_window = 500;  // words pooled and shuffled together
  std::size_t kmeans_max_iters = 100;
  double initial_count = 100.0;      // per-centroid count before fine-tuning updates
  std::uint64_t seed = 42;

  void validate() const {
    require(lambda >= 0.0, "config: lambda must be >= 0");
    require(learning_rate > 0.0, "config: learning rate must be > 0");
    require(clusters >= 2, "config: K must be >= 2");
    require(batch_size >= 1 && per_word_batches >= 1 && shuffle_window >= 1 && loops >= 1,
            "config: batch size, per-word batches, shuffle window and loops must be >= 1");
    require(kmeans_max_iters >= 1, "config: kmeans_max_iters must be >= 1");
    require(initial_count >= 0.0, "config: initial_count must be >= 0");
  }
};

struct BatchLoss {
  std::size_t batch = 0;  // 1-based, running across epochs
  double reconstruction = 0.0;
  double clustering = 0.0;
};

struct PretrainResult {
  Autoencoder ae;
  SememeSpace space;
  std::vector<BatchLoss> history;
};

struct FinetuneResult {
  Autoencoder ae;
  SememeSpace space;
  std::vector<BatchLoss> history;
  std::size_t epochs_run = 0;
};

using BatchCallback = std::function<void(const BatchLoss&)>;

// Streams the training batches of one pass: word order shuffled in windows of
// `shuffle_window`; for each window every word contributes per_word_batches *
// batch_size meanings, the pooled rows are shuffled and cut into batches.
inline void for_each_training_batch(const MeaningSource& source, const TrainConfig& cfg, std::string_view phase,
                                    std::size_t epoch, const std::function<void(const Matrix&)>& fn) {
  const CounterRng root = CounterRng(cfg.seed, hash_name(phase)).split(epoch);
  std::vector<std::size_t> order(source.group_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  order = shuffled_word_stream(std::move(order), cfg.shuffle_window, root.split("order").next());
  const std::size_t per_word = cfg.per_word_batches * cfg.batch_size;
  const auto dim = static_cast<Eigen::Index>(source.dim());

  for (std::size_t start = 0; start < order.size(); start += cfg.shuffle_window) {
    const std::size_t end = std::min(order.size(), start + cfg.shuffle_window);
    std::vector<Matrix> parts;
    Eigen::Index rows = 0;
    for (std::size_t w = start; w < end; ++w) {
      MeaningBatch b = source.draw(order[w], per_word, root.split(order[w]).next());
      rows += b.meanings.rows();
      parts.push_back(std::move(b.meanings));
    }
    Matrix pool(rows, dim);
    Eigen::Index r = 0;
    for (const auto& p : parts) {
      pool.middleRows(r, p.rows()) = p;
      r += p.rows();
    }
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(rows));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    CounterRng shuffle_rng = root.split("pool").split(start);
    shuffle_rng.shuffle(perm);
    for (Eigen::Index b0 = 0; b0 < rows; b0 += static_cast<Eigen::Index>(cfg.batch_size)) {
      const Eigen::Index n = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.batch_size), rows - b0);
      Matrix batch(n, dim);
      for (Eigen::Index i = 0; i < n; ++i) batch.row(i) = pool.row(perm[static_cast<std::size_t>(b0 + i)]);
      fn(batch);
    }
  }
}

// Latent codes of per_word_batches * batch_size fresh meanings per word.
inline Matrix collect_latents(const MeaningSource& source, const Autoencoder& ae, const TrainConfig& cfg,
                              std::size_t loop) {
  const CounterRng root = CounterRng(cfg.seed, hash_name("pretrain.collect")).split(loop);
  std::vector<Matrix> parts;
  Eigen::Index rows = 0;
  for (std::size_t g = 0; g < source.group_count(); ++g) {
    MeaningBatch b = source.draw(g, cfg.per_word_batches * cfg.batch_size, root.split(g).next());
    parts.push_back(ae.encode(b.meanings));
    rows += parts.back().rows();
  }
  Matrix out(rows, static_cast<Eigen::Index>(ae.latent_dim()));
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.middleRows(r, p.rows()) = p;
    r += p.rows();
  }
  return out;
}

// Phase 1: train the autoencoder on the reconstruction loss alone.
// Phase 2: per sampling loop, encode fresh samples of every word and run K-means;
// K-means over the loops * K collected centroids gives the initial sememe space.
inline PretrainResult pretrain(const MeaningSource& source, const TrainConfig& cfg, const BatchCallback& on_batch = {}) {
  cfg.validate();
  if (source.group_count() == 0) fail(ErrorKind::kDegenerate, "pretrain: empty meaning stream");
  PretrainResult res;
  res.ae = Autoencoder::create(source.dim(), cfg.layers, cfg.seed);

  std::size_t batch_no = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for_each_training_batch(source, cfg, "pretrain", epoch, [&](const Matrix& x) {
      LossAndGrad lg = loss_and_gradient(res.ae, x, Matrix(), 0.0);
      sgd_step(res.ae, lg.grad, cfg.learning_rate);
      BatchLoss bl{++batch_no, lg.reconstruction, 0.0};
      res.history.push_back(bl);
      if (on_batch) on_batch(bl);
    });
  }

  Matrix collected(static_cast<Eigen::Index>(cfg.loops * cfg.clusters), static_cast<Eigen::Index>(res.ae.latent_dim()));
  for (std::size_t loop = 0; loop < cfg.loops; ++loop) {
    const Matrix latents = collect_latents(source, res.ae, cfg, loop);
    const KMeansResult km = kmeans(latents, cfg.clusters, cfg.kmeans_max_iters, CounterRng(cfg.seed).split(loop).next());
    collected.middleRows(static_cast<Eigen::Index>(loop * cfg.clusters), static_cast<Eigen::Index>(cfg.clusters)) =
        km.space.m.transpose();
  }
  res.space = kmeans(collected, cfg.clusters, cfg.kmeans_max_iters, CounterRng(cfg.seed).split("final").next()).space;
  return res;
}

// One joint step on a batch: assignments from the current network, an SGD step on
// L_n + lambda * L_c with assignments and M fixed, then every sample is re-encoded,
// re-assigned and folded into its centroid. Returns the pre-step losses.
inline BatchLoss finetune_step(Autoencoder& ae, SememeSpace& space, std::vector<double>& counts, const Matrix& x,
                               double lambda, double lr) {
  const Matrix latents = ae.encode(x);
  const auto assignments = assign_rows(latents, space);
  const Matrix targets = assigned_centroids(space, assignments);
  const LossAndGrad lg = loss_and_gradient(ae, x, targets, lambda);
  sgd_step(ae, lg.grad, lr);
  const Matrix updated = ae.encode(x);
  for (Eigen::Index i = 0; i < updated.rows(); ++i) {
    const Vector z = updated.row(i).transpose();
    update_centroids(space, counts, z, nearest_centroid(z, space.m));
  }
  return {0, lg.reconstruction, lg.clustering};
}

inline FinetuneResult finetune(const MeaningSource& source, Autoencoder ae, SememeSpace space, const TrainConfig& cfg,
                               const BatchCallback& on_batch = {}) {
  cfg.validate();
  require(space.latent_dim() == ae.latent_dim(), "finetune: sememe space width does not match the latent width");
  require(space.clusters() >= 2, "finetune: K must be >= 2");
  FinetuneResult res;
  std::vector<double> counts(space.clusters(), cfg.initial_count);
  std::size_t batch_no = 0, stale = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.finetune_epochs; ++epoch) {
    double sum_lc = 0.0;
    std::size_t batches = 0;
    for_each_training_batch(source, cfg, "finetune", epoch, [&](const Matrix& x) {
      BatchLoss bl = finetune_step(ae, space, counts, x, cfg.lambda, cfg.learning_rate);
      bl.batch = ++batch_no;
      sum_lc += bl.clustering;
      ++batches;
      res.history.push_back(bl);
      if (on_batch) on_batch(bl);
    });
    res.epochs_run = epoch + 1;
    const double mean_lc = batches ? sum_lc / static_cast<double>(batches) : 0.0;
    if (mean_lc < best) {
      best = mean_lc;
      stale = 0;
    } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }
  res.ae = std::move(ae);
  res.space = std::move(space);
  return res;
}

}  // namespace sememe
