#pragma once

// Sememe space M (latent width x K, one centroid per column), nearest-centroid
// assignment, the K-means cost, Lloyd's algorithm and the streaming centroid update.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sememe/error.hpp"
#include "sememe/rng.hpp"
#include "sememe/tensor.hpp"

namespace sememe {

struct SememeSpace {
  Matrix m;  // R x K

  std::size_t latent_dim() const { return static_cast<std::size_t>(m.rows()); }
  std::size_t clusters() const { return static_cast<std::size_t>(m.cols()); }
  Vector centroid(std::size_t k) const { return m.col(static_cast<Eigen::Index>(k)); }

  friend bool operator==(const SememeSpace& a, const SememeSpace& b) {
    return a.m.rows() == b.m.rows() && a.m.cols() == b.m.cols() && a.m == b.m;
  }
};

struct AssignmentVector {
  std::size_t index = 0;
  Vector s;  // one-hot, length K
};

// Index of the nearest column in squared Euclidean distance; ties go to the lowest index.
inline std::size_t nearest_centroid(const Eigen::Ref<const Vector>& latent, const Matrix& m) {
  require(latent.size() == m.rows(), "assign: latent width does not match the sememe space");
  require(m.cols() >= 1, "assign: empty sememe space");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double d = (m.col(k) - latent).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(k);
    }
  }
  return best;
}

inline AssignmentVector assign(const Eigen::Ref<const Vector>& latent, const SememeSpace& space) {
  AssignmentVector a;
  a.index = nearest_centroid(latent, space.m);
  a.s = Vector::Zero(space.m.cols());
  a.s(static_cast<Eigen::Index>(a.index)) = 1.0;
  return a;
}

inline std::vector<std::size_t> assign_rows(const Matrix& latents, const SememeSpace& space) {
  std::vector<std::size_t> out(static_cast<std::size_t>(latents.rows()));
  for (Eigen::Index i = 0; i < latents.rows(); ++i) out[static_cast<std::size_t>(i)] = nearest_centroid(latents.row(i).transpose(), space.m);
  return out;
}

// Rows M s_i for each assignment.
inline Matrix assigned_centroids(const SememeSpace& space, const std::vector<std::size_t>& assignments) {
  Matrix c(static_cast<Eigen::Index>(assignments.size()), space.m.rows());
  for (std::size_t i = 0; i < assignments.size(); ++i) c.row(static_cast<Eigen::Index>(i)) = space.m.col(static_cast<Eigen::Index>(assignments[i])).transpose();
  return c;
}

// Mean over rows of ||f(x_i) - M s_i||^2.
inline double clustering_loss(const Matrix& latents, const SememeSpace& space,
                              const std::vector<std::size_t>& assignments) {
  require(static_cast<std::size_t>(latents.rows()) == assignments.size(), "clustering_loss: size mismatch");
  require(latents.rows() > 0, "clustering_loss: empty batch");
  for (auto k : assignments) require(k < space.clusters(), "clustering_loss: assignment out of range");
  return (latents - assigned_centroids(space, assignments)).squaredNorm() / static_cast<double>(latents.rows());
}

// counts[k] += 1; M_k <- M_k - (M_k - latent) / counts[k].
inline void update_centroids(SememeSpace& space, std::vector<double>& counts, const Eigen::Ref<const Vector>& latent,
                             std::size_t k) {
  require(k < space.clusters() && counts.size() == space.clusters(), "update_centroids: bad cluster index");
  require(latent.size() == space.m.rows(), "update_centroids: latent width mismatch");
  counts[k] += 1.0;
  auto col = space.m.col(static_cast<Eigen::Index>(k));
  col -= (1.0 / counts[k]) * (col - latent);
}

struct KMeansResult {
  SememeSpace space;
  std::vector<std::size_t> labels;  // final assignment of every data row
  std::vector<double> costs;        // sum of squared distances after each assignment step
  std::size_t iterations = 0;
};

namespace detail {

// k-means++ seeding. Rows of the returned matrix are centroids.
inline Matrix kmeanspp_seed(const Matrix& data, std::size_t k, CounterRng& rng) {
  const auto n = static_cast<std::size_t>(data.rows());
  Matrix centers(static_cast<Eigen::Index>(k), data.cols());
  std::vector<char> chosen(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    chosen[pick] = 1;
    centers.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(pick));
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (data.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm());
      total += d2[i];
    }
    if (total > 0.0) {
      double r = rng.uniform() * total;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        r -= d2[i];
        if (r < 0.0) break;
      }
    } else {
      // Every remaining point coincides with a center; take an unused row at random.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[rng.below(free.size())];
    }
  }
  return centers;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding on the rows of `data`. A cluster that
// loses all its points is re-seeded at the point farthest from its own centroid.
// Stops when assignments stop changing or after max_iters assignment steps.
// `costs` is non-increasing.
inline KMeansResult kmeans(const Matrix& data, std::size_t k, std::size_t max_iters, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.rows());
  require(k >= 1, "kmeans: K must be >= 1");
  if (n < k) fail(ErrorKind::kDegenerate, "kmeans: need N >= K (N=" + std::to_string(n) + ", K=" + std::to_string(k) + ")");
  require(data.allFinite(), "kmeans: non-finite data");
  require(max_iters >= 1, "kmeans: max_iters must be >= 1");

  CounterRng rng(seed, hash_name("kmeans"));
  Matrix centers = detail::kmeanspp_seed(data, k, rng);
  std::vector<std::size_t> labels(n, k);
  std::vector<double> dist(n, 0.0);
  KMeansResult res;

  // Lloyd steps cannot raise the cost in exact arithmetic. A computed rise no larger
  // than the rounding error of the cost sum is treated as convergence and the
  // previous iterate is kept; anything larger is a bug.
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                          (data.squaredNorm() + static_cast<double>(n) * static_cast<double>(data.cols()));
  Matrix prev_centers = centers;
  std::vector<std::size_t> prev_labels = labels;

  for (std::size_t it = 0; it < max_iters; ++it) {
    bool changed = false;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (data.row(static_cast<Eigen::Index>(i)) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed |= labels[i] != best;
      labels[i] = best;
      dist[i] = best_d;
      cost += best_d;
    }
    if (!res.costs.empty() && cost > res.costs.back()) {
      if (cost - res.costs.back() > roundoff) {
        throw std::logic_error("kmeans: objective increased from " + std::to_string(res.costs.back()) + " to " +
                               std::to_string(cost));
      }
      centers = prev_centers;
      labels = prev_labels;
      break;
    }
    res.costs.push_back(cost);
    res.iterations = it + 1;
    if (!changed) break;
    prev_centers = centers;
    prev_labels = labels;

    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), data.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(labels[i])) += data.row(static_cast<Eigen::Index>(i));
      ++sizes[labels[i]];
    }
    std::vector<char> taken(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        centers.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(sizes[c]);
        continue;
      }
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
      }
      taken[far] = 1;
      centers.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(far));
    }
  }
  res.space.m = centers.transpose();
  res.labels = std::move(labels);
  return res;
}

}  // namespace sememe
