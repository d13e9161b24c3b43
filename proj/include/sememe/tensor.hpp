#pragma once

// Dense kernels shared by every stage: the matrix carrier, the scaled softmax
// used by attention, cosine similarity and a thin SVD.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sememe/error.hpp"

namespace sememe {

// Row-major, 64-bit. Samples are stored one per row throughout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Normalized exponentials of scale * v, computed with max-subtraction.
inline Vector softmax_scaled(const Eigen::Ref<const Vector>& v, double scale) {
  if (v.size() == 0) fail("empty input");
  if (!v.allFinite()) fail("non-finite input");
  require(std::isfinite(scale) && scale > 0.0, "softmax scale must be positive");
  // Shift before scaling so scale * v never has to be representable.
  Vector z = ((v.array() - v.maxCoeff()) * scale).exp();
  return z / z.sum();
}

inline double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  require(a.size() == b.size(), "cosine_similarity: length mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) fail("zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

struct Svd {
  Matrix u;  // m x r, orthonormal columns
  Vector s;  // r = min(m, n), non-increasing, non-negative
  Matrix v;  // n x r, orthonormal columns
};

// Thin SVD, a = u * diag(s) * v^T.
inline Svd svd(const Matrix& a) {
  if (!a.allFinite()) fail("svd: non-finite input");
  if (a.size() == 0) return {Matrix(a.rows(), 0), Vector(0), Matrix(a.cols(), 0)};
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

inline Vector to_vector(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::Ref<const Vector>& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace sememe
