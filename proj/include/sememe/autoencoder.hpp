#pragma once

// Fully connected autoencoder f(.; W) / g(.; Z) with analytic gradients of the
// reconstruction loss, optionally joined with the K-means pull on the latent.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sememe/error.hpp"
#include "sememe/rng.hpp"
#include "sememe/tensor.hpp"

namespace sememe {

enum class Activation { kLinear, kRelu };

inline std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "linear"; }
inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "linear") return Activation::kLinear;
  fail("unknown activation '" + s + "'");
}

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::kLinear;

  std::size_t in() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weight.rows()); }
};

// Layer-shaped container used for gradients and parameter deltas.
struct ParamGrad {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
};

class Autoencoder {
 public:
  Autoencoder() = default;

  // Layers [0, bottleneck] form the encoder; the output of layer `bottleneck` is the latent.
  Autoencoder(std::vector<DenseLayer> layers, std::size_t bottleneck) : layers_(std::move(layers)), bottleneck_(bottleneck) {
    require(!layers_.empty(), "Autoencoder: no layers");
    require(bottleneck_ + 1 < layers_.size(), "Autoencoder: bottleneck must leave at least one decoder layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& L = layers_[l];
      require(L.bias.size() == L.weight.rows(), "Autoencoder: bias size mismatch in layer " + std::to_string(l));
      if (l > 0) require(L.in() == layers_[l - 1].out(), "Autoencoder: layer " + std::to_string(l) + " does not chain");
    }
    require(layers_.back().out() == layers_.front().in(), "Autoencoder: output width must equal input width");
  }

  // input -> hidden[0] -> ... -> hidden[n-1] -> input. `hidden` must be a palindrome of
  // odd length; its middle entry is the latent width and must be below the input width.
  // ReLU on hidden layers, linear on the bottleneck and output. Glorot-uniform weights,
  // zero biases.
  static Autoencoder create(std::size_t input_dim, std::span<const std::size_t> hidden, std::uint64_t seed) {
    require(input_dim >= 1, "Autoencoder: input width must be positive");
    require(hidden.size() % 2 == 1, "Autoencoder: hidden layer list must have odd length");
    for (std::size_t i = 0; i < hidden.size(); ++i) {
      require(hidden[i] >= 1, "Autoencoder: zero-width layer");
      require(hidden[i] == hidden[hidden.size() - 1 - i], "Autoencoder: encoder and decoder widths must mirror");
    }
    const std::size_t mid = hidden.size() / 2;
    require(hidden[mid] < input_dim, "Autoencoder: latent width must be smaller than the input width");

    std::vector<std::size_t> sizes{input_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(input_dim);
    const CounterRng root(seed, hash_name("autoencoder.init"));
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      DenseLayer L;
      const auto fan_in = sizes[l], fan_out = sizes[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      CounterRng rng = root.split(l);
      L.weight.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
      for (Eigen::Index i = 0; i < L.weight.size(); ++i) L.weight.data()[i] = rng.uniform(-limit, limit);
      L.bias = Vector::Zero(static_cast<Eigen::Index>(fan_out));
      const bool is_bottleneck = l == mid, is_output = l + 2 == sizes.size();
      L.activation = (is_bottleneck || is_output) ? Activation::kLinear : Activation::kRelu;
      layers.push_back(std::move(L));
    }
    return Autoencoder(std::move(layers), mid);
  }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t bottleneck() const { return bottleneck_; }
  std::size_t input_dim() const { return layers_.front().in(); }
  std::size_t latent_dim() const { return layers_[bottleneck_].out(); }

  // Full width list: input, every layer output.
  std::vector<std::size_t> layer_sizes() const {
    std::vector<std::size_t> s{input_dim()};
    for (const auto& L : layers_) s.push_back(L.out());
    return s;
  }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& L : layers_) n += static_cast<std::size_t>(L.weight.size() + L.bias.size());
    return n;
  }

  // Outputs of layers [first, last) applied to `x` (one sample per row).
  Matrix run(const Matrix& x, std::size_t first, std::size_t last) const {
    Matrix a = x;
    for (std::size_t l = first; l < last; ++l) a = apply(layers_[l], a);
    return a;
  }
  Matrix encode(const Matrix& x) const {
    require(static_cast<std::size_t>(x.cols()) == input_dim(), "encode: dimension mismatch");
    return run(x, 0, bottleneck_ + 1);
  }
  Matrix decode(const Matrix& z) const {
    require(static_cast<std::size_t>(z.cols()) == latent_dim(), "decode: dimension mismatch");
    return run(z, bottleneck_ + 1, layers_.size());
  }

  ParamGrad zero_grad() const {
    ParamGrad g;
    for (const auto& L : layers_) {
      g.weight.push_back(Matrix::Zero(L.weight.rows(), L.weight.cols()));
      g.bias.push_back(Vector::Zero(L.bias.size()));
    }
    return g;
  }

  static Matrix apply(const DenseLayer& L, const Matrix& a) {
    Matrix h = a * L.weight.transpose();
    h.rowwise() += L.bias.transpose();
    if (L.activation == Activation::kRelu) h = h.cwiseMax(0.0);
    return h;
  }

  friend bool operator==(const Autoencoder& a, const Autoencoder& b) {
    if (a.bottleneck_ != b.bottleneck_ || a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      const auto &x = a.layers_[l], &y = b.layers_[l];
      if (x.activation != y.activation || x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols() ||
          x.weight != y.weight || x.bias != y.bias) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<DenseLayer> layers_;
  std::size_t bottleneck_ = 0;
};

struct AeOutput {
  Vector latent;
  Vector reconstruction;
};

inline AeOutput ae_forward(const Autoencoder& ae, const Eigen::Ref<const Vector>& x) {
  if (static_cast<std::size_t>(x.size()) != ae.input_dim()) fail("ae_forward: dimension mismatch");
  const Matrix row = x.transpose();
  Matrix z = ae.encode(row);
  Matrix r = ae.decode(z);
  return {z.row(0).transpose(), r.row(0).transpose()};
}

// Mean over rows of ||g(f(x)) - x||^2.
inline double reconstruction_loss(const Autoencoder& ae, const Matrix& batch) {
  require(batch.rows() > 0, "reconstruction_loss: empty batch");
  const Matrix r = ae.decode(ae.encode(batch));
  return (r - batch).squaredNorm() / static_cast<double>(batch.rows());
}

struct LossAndGrad {
  double reconstruction = 0.0;  // L_n, batch mean
  double clustering = 0.0;      // L_c, batch mean (0 without targets)
  ParamGrad grad;               // of the batch sum of per-sample losses
};

// Backpropagation for L_n + lambda * L_c where L_c pulls each latent towards the
// matching row of `latent_targets` (the assigned centroid M s_i, held constant).
// Pass an empty `latent_targets` for the reconstruction loss alone.
// The returned losses are batch means; the gradient is that of the per-sample
// objective summed over the batch, so one step moves as far as the per-sample
// steps it stands in for.
inline LossAndGrad loss_and_gradient(const Autoencoder& ae, const Matrix& x, const Matrix& latent_targets,
                                     double lambda) {
  require(x.rows() > 0, "loss_and_gradient: empty batch");
  require(static_cast<std::size_t>(x.cols()) == ae.input_dim(), "loss_and_gradient: dimension mismatch");
  const bool joint = latent_targets.size() > 0;
  if (joint) {
    require(latent_targets.rows() == x.rows() && static_cast<std::size_t>(latent_targets.cols()) == ae.latent_dim(),
            "loss_and_gradient: latent target shape mismatch");
  }
  const auto& layers = ae.layers();
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  std::vector<Matrix> acts;  // acts[0] = x, acts[l + 1] = output of layer l
  acts.reserve(layers.size() + 1);
  acts.push_back(x);
  for (const auto& L : layers) acts.push_back(Autoencoder::apply(L, acts.back()));

  LossAndGrad out;
  out.grad = ae.zero_grad();
  const Matrix diff = acts.back() - x;
  out.reconstruction = diff.squaredNorm() * inv_n;
  Matrix latent_diff;
  if (joint) {
    latent_diff = acts[ae.bottleneck() + 1] - latent_targets;
    out.clustering = latent_diff.squaredNorm() * inv_n;
  }

  Matrix delta = 2.0 * diff;  // d loss / d (output of current layer)
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (joint && lambda != 0.0 && l == ae.bottleneck()) delta += (2.0 * lambda) * latent_diff;
    if (layers[l].activation == Activation::kRelu) {
      delta = delta.cwiseProduct((acts[l + 1].array() > 0.0).cast<double>().matrix());
    }
    out.grad.weight[l].noalias() = delta.transpose() * acts[l];
    out.grad.bias[l] = delta.colwise().sum().transpose();
    if (l > 0) delta = delta * layers[l].weight;
  }
  return out;
}

// params <- params - lr * grad
inline void sgd_step(Autoencoder& ae, const ParamGrad& grad, double lr) {
  auto& layers = ae.layers();
  require(grad.weight.size() == layers.size() && grad.bias.size() == layers.size(), "sgd_step: shape mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require(grad.weight[l].rows() == layers[l].weight.rows() && grad.weight[l].cols() == layers[l].weight.cols() &&
                grad.bias[l].size() == layers[l].bias.size(),
            "sgd_step: shape mismatch in layer " + std::to_string(l));
  }
  if (lr == 0.0) return;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].weight -= lr * grad.weight[l];
    layers[l].bias -= lr * grad.bias[l];
  }
}

}  // namespace sememe
