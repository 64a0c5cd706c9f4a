#include "netreg/tangent.hpp"

#include <cmath>

namespace netreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

Eigen::Index nodes_for_length(Eigen::Index len) {
  // len = m(m-1)/2 for some integer m >= 2.
  const double root = (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(len))) / 2.0;
  const Eigen::Index m = static_cast<Eigen::Index>(std::llround(root));
  if (m < 2 || m * (m - 1) / 2 != len) {
    throw DataError("TangentVector: length " + std::to_string(len) +
                    " is not m(m-1)/2 for any m");
  }
  return m;
}

Eigen::VectorXd vech_isometric(const Eigen::MatrixXd& b) {
  const Eigen::Index k = b.rows();
  Eigen::VectorXd v(k * (k + 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    v(idx++) = b(i, i);
    for (Eigen::Index j = i + 1; j < k; ++j) {
      v(idx++) = kSqrt2 * b(i, j);
    }
  }
  return v;
}

Eigen::MatrixXd unvech_isometric(const Eigen::VectorXd& v, Eigen::Index k) {
  Eigen::MatrixXd b(k, k);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    b(i, i) = v(idx++);
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double entry = v(idx++) / kSqrt2;
      b(i, j) = entry;
      b(j, i) = entry;
    }
  }
  return b;
}

}  // namespace

HelmertBasis::HelmertBasis(Eigen::Index m) {
  if (m < 2) {
    throw DataError("HelmertBasis: need m >= 2, got " + std::to_string(m));
  }
  h_ = Eigen::MatrixXd::Zero(m - 1, m);
  for (Eigen::Index j = 1; j < m; ++j) {
    const double hj = -1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
    for (Eigen::Index c = 0; c < j; ++c) h_(j - 1, c) = hj;
    h_(j - 1, j) = -static_cast<double>(j) * hj;
  }
}

HelmertBasis helmert_submatrix(Eigen::Index m) { return HelmertBasis(m); }

TangentVector::TangentVector(Eigen::VectorXd c, Eigen::Index nodes, double a)
    : coords(std::move(c)), m(nodes), alpha(a) {
  if (m < 2) {
    throw DataError("TangentVector: need m >= 2, got " + std::to_string(m));
  }
  if (coords.size() != m * (m - 1) / 2) {
    throw DataError("TangentVector: length " + std::to_string(coords.size()) +
                    " does not match m(m-1)/2 = " +
                    std::to_string(m * (m - 1) / 2));
  }
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw DataError("TangentVector: alpha must be a finite positive real");
  }
}

TangentVector::TangentVector(Eigen::VectorXd c, double a)
    : coords(std::move(c)), m(nodes_for_length(coords.size())), alpha(a) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw DataError("TangentVector: alpha must be a finite positive real");
  }
}

TangentVector to_tangent(const GraphLaplacian& L, const PowerConfig& cfg) {
  const SymmetricMatrix embedded = power_map(L, cfg);
  const HelmertBasis helmert(L.size());
  Eigen::MatrixXd b =
      helmert.matrix() * embedded.matrix() * helmert.matrix().transpose();
  b = (0.5 * (b + b.transpose())).eval();
  return TangentVector(vech_isometric(b), L.size(), cfg.alpha);
}

SymmetricMatrix from_tangent(const TangentVector& v) {
  const Eigen::Index k = v.m - 1;
  const Eigen::MatrixXd b = unvech_isometric(v.coords, k);
  const HelmertBasis helmert(v.m);
  return SymmetricMatrix(helmert.matrix().transpose() * b * helmert.matrix());
}

}  // namespace netreg
