#pragma once

// Shared fixtures for the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "sememe/sememe.hpp"

namespace testing_support {

using sememe::CounterRng;
using sememe::Matrix;
using sememe::Vector;

inline std::filesystem::path data_dir() { return SEMEME_TEST_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sememe-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

inline Matrix random_normal(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

// Orthogonal matrix from the QR factorization of a Gaussian matrix.
inline Matrix random_rotation(Eigen::Index d, CounterRng& rng) {
  const Matrix a = random_normal(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

// Rows grouped by a label; draws sample rows of one group without replacement.
class GroupedRows final : public sememe::MeaningSource {
 public:
  GroupedRows(Matrix data, std::vector<std::size_t> group_of, std::size_t groups)
      : data_(std::move(data)), members_(groups) {
    for (std::size_t i = 0; i < group_of.size(); ++i) members_.at(group_of[i]).push_back(i);
  }

  std::size_t group_count() const override { return members_.size(); }
  std::size_t dim() const override { return static_cast<std::size_t>(data_.cols()); }
  sememe::MeaningBatch draw(std::size_t group, std::size_t n, std::uint64_t seed) const override {
    std::vector<std::size_t> idx = members_.at(group);
    CounterRng rng(seed, sememe::hash_name("grouped-rows"));
    rng.shuffle(idx);
    idx.resize(std::min(n, idx.size()));
    sememe::MeaningBatch b;
    b.token = "g" + std::to_string(group);
    b.meanings.resize(static_cast<Eigen::Index>(idx.size()), data_.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      b.sentence_ids.push_back(static_cast<sememe::SentenceId>(idx[i]));
      b.meanings.row(static_cast<Eigen::Index>(i)) = data_.row(static_cast<Eigen::Index>(idx[i]));
    }
    return b;
  }

 private:
  Matrix data_;
  std::vector<std::vector<std::size_t>> members_;
};

struct LabelledData {
  Matrix x;
  std::vector<std::size_t> labels;
  Matrix means;  // one row per component, in the generating space
};

// `k` isotropic Gaussians with standard deviation `sigma` in `dim` dimensions.
// Means are redrawn until every pair is at least `min_gap` apart.
inline LabelledData gaussian_mixture(std::size_t k, std::size_t per_cluster, std::size_t dim, double sigma,
                                     double min_gap, CounterRng& rng) {
  LabelledData out;
  const auto d = static_cast<Eigen::Index>(dim);
  for (;;) {
    out.means = random_matrix(static_cast<Eigen::Index>(k), d, rng, -1.5, 1.5);
    bool ok = true;
    for (Eigen::Index a = 0; a < out.means.rows(); ++a) {
      for (Eigen::Index b = a + 1; b < out.means.rows(); ++b) ok &= (out.means.row(a) - out.means.row(b)).norm() >= min_gap;
    }
    if (ok) break;
  }
  out.x.resize(static_cast<Eigen::Index>(k * per_cluster), d);
  for (std::size_t c = 0, r = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i, ++r) {
      for (Eigen::Index j = 0; j < d; ++j) out.x(static_cast<Eigen::Index>(r), j) = out.means(static_cast<Eigen::Index>(c), j) + sigma * rng.normal();
      out.labels.push_back(c);
    }
  }
  return out;
}

// Fraction of points whose predicted cluster maps to the true label under the
// best one-to-one relabelling (exhaustive over permutations; k is small).
inline double best_permutation_accuracy(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                                        std::size_t k) {
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += perm[predicted[i]] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

// Summed per-sample objective sum_i ||g(f(x_i)) - x_i||^2 + lambda ||f(x_i) - t_i||^2,
// evaluated by plain forward passes.
inline double summed_objective(const sememe::Autoencoder& ae, const Matrix& x, const Matrix& targets, double lambda) {
  const Matrix z = ae.encode(x);
  const Matrix r = ae.decode(z);
  double total = (r - x).squaredNorm();
  if (targets.size() > 0) total += lambda * (z - targets).squaredNorm();
  return total;
}

struct GradCheck {
  double relative_error = 0.0;
  std::size_t parameters = 0;
};

// Central finite differences of summed_objective against loss_and_gradient.
inline GradCheck check_gradient(sememe::Autoencoder ae, const Matrix& x, const Matrix& targets, double lambda,
                                double h = 1e-6) {
  const sememe::LossAndGrad lg = sememe::loss_and_gradient(ae, x, targets, lambda);
  double diff2 = 0.0, analytic2 = 0.0, numeric2 = 0.0;
  GradCheck out;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = summed_objective(ae, x, targets, lambda);
    param = saved - h;
    const double down = summed_objective(ae, x, targets, lambda);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    diff2 += (numeric - analytic) * (numeric - analytic);
    analytic2 += analytic * analytic;
    numeric2 += numeric * numeric;
    ++out.parameters;
  };
  auto& layers = ae.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (Eigen::Index i = 0; i < layers[l].weight.size(); ++i) probe(layers[l].weight.data()[i], lg.grad.weight[l].data()[i]);
    for (Eigen::Index i = 0; i < layers[l].bias.size(); ++i) probe(layers[l].bias.data()[i], lg.grad.bias[l].data()[i]);
  }
  const double scale = std::max(std::sqrt(analytic2), std::sqrt(numeric2));
  out.relative_error = scale > 0.0 ? std::sqrt(diff2) / scale : 0.0;
  return out;
}

// Small autoencoder input -> hidden -> latent -> hidden -> input with random
// biases, so no unit sits exactly at a ReLU kink.
inline sememe::Autoencoder small_autoencoder(std::size_t input, std::size_t hidden, std::size_t latent, CounterRng& rng) {
  const std::vector<std::size_t> widths{hidden, latent, hidden};
  sememe::Autoencoder ae = sememe::Autoencoder::create(input, widths, rng.next());
  for (auto& L : ae.layers()) {
    for (Eigen::Index i = 0; i < L.bias.size(); ++i) L.bias(i) = rng.uniform(-0.5, 0.5);
  }
  return ae;
}

// Brute-force nearest column: plain loop, lowest index wins ties.
inline std::size_t brute_force_nearest(const Vector& latent, const Matrix& m) {
  std::size_t best = 0;
  double best_d = 0.0;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    double d = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) d += (m(r, k) - latent(r)) * (m(r, k) - latent(r));
    if (k == 0 || d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(k);
    }
  }
  return best;
}

// Shannon entropy in nats.
inline double entropy(const Vector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

}  // namespace testing_support
