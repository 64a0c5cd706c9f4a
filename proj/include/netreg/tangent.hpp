#pragma once

#include <Eigen/Core>

#include "netreg/laplacian.hpp"
#include "netreg/spectral.hpp"

namespace netreg {

/// Helmert sub-matrix: (m-1)×m with orthonormal rows orthogonal to the
/// all-ones vector. Row j (1-indexed) is (h_j,...,h_j, -j·h_j, 0,...,0) with
/// h_j = -1/sqrt(j(j+1)). Immutable; safe to cache and share per m.
class HelmertBasis {
 public:
  explicit HelmertBasis(Eigen::Index m);

  const Eigen::MatrixXd& matrix() const { return h_; }
  Eigen::Index nodes() const { return h_.cols(); }

 private:
  Eigen::MatrixXd h_;
};

HelmertBasis helmert_submatrix(Eigen::Index m);

/// Euclidean coordinates of an embedded Laplacian at the tangent base point
/// zero: vech(H F_alpha(L) Hᵀ) with the isometric half-vectorization
/// (strictly-upper entries scaled by sqrt(2)), so tangent norms equal
/// Frobenius norms of the embedded matrices.
struct TangentVector {
  Eigen::VectorXd coords;  // length m(m-1)/2
  Eigen::Index m = 0;      // node count
  double alpha = 1.0;      // power used to embed

  TangentVector(Eigen::VectorXd coords, Eigen::Index m, double alpha);
  /// Infers m from the coordinate length; errors when the length is not a
  /// triangular number.
  TangentVector(Eigen::VectorXd coords, double alpha);
};

TangentVector to_tangent(const GraphLaplacian& L, const PowerConfig& cfg);

/// Inverts the half-vectorization and undoes the Helmert conjugation:
/// returns Hᵀ B H, an m×m centered symmetric matrix. Exact round trip on the
/// embedded image: from_tangent(to_tangent(L)) = F_alpha(L).
SymmetricMatrix from_tangent(const TangentVector& v);

}  // namespace netreg
