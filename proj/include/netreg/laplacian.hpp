#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "netreg/errors.hpp"

namespace netreg {

/// Weighted undirected network without loops: an ordered list of distinct
/// node labels and a symmetric nonnegative weight matrix with zero diagonal.
/// Construction rejects any violation, naming the offending entry.
class WeightedNetwork {
 public:
  WeightedNetwork(std::vector<std::string> node_labels, Eigen::MatrixXd weights);

  const std::vector<std::string>& node_labels() const { return node_labels_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.rows(); }

 private:
  std::vector<std::string> node_labels_;
  Eigen::MatrixXd weights_;
};

/// Symmetric matrix stored canonically: matrix() == matrix().transpose()
/// bitwise. The constructor symmetrizes (M + Mᵀ)/2; asymmetry beyond
/// 1e-9·max(1, max|entry|) is an error.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Eigen::MatrixXd mat);

  const Eigen::MatrixXd& matrix() const { return mat_; }
  Eigen::Index size() const { return mat_.rows(); }

 private:
  Eigen::MatrixXd mat_;
};

/// Graph Laplacian: dense symmetric m×m matrix with nonpositive off-diagonal
/// entries and zero row sums (hence positive semi-definite). Values are
/// immutable after construction. Internally constructed Laplacians satisfy
/// the sign and symmetry constraints exactly and the row-sum constraint to
/// machine precision; see validate_laplacian for the tolerance model.
class GraphLaplacian {
 public:
  /// Checked construction from an arbitrary square matrix.
  explicit GraphLaplacian(Eigen::MatrixXd mat, double tol = 1e-9);

  /// Trusted construction: the caller guarantees the invariants (used by
  /// producers whose output satisfies them by construction).
  static GraphLaplacian unchecked(Eigen::MatrixXd mat);

  const Eigen::MatrixXd& matrix() const { return mat_; }
  Eigen::Index size() const { return mat_.rows(); }

 private:
  GraphLaplacian() = default;
  Eigen::MatrixXd mat_;
};

/// Per-constraint report produced by validate_laplacian. `failures` holds one
/// human-readable line per violated constraint with its worst offender.
struct LaplacianDiagnostics {
  bool ok = false;
  double symmetry_gap = 0.0;      // max |M(i,j) - M(j,i)|
  double off_diagonal_gap = 0.0;  // max over i!=j of max(0, M(i,j))
  double row_sum_gap = 0.0;       // max |row sum|
  double threshold = 0.0;         // resolved absolute threshold tol*max(1, ||M||_F)
  std::vector<std::string> failures;
};

/// L = D - A: off-diagonal entries -w_ij, diagonal entries the node degrees.
GraphLaplacian laplacian_from_network(const WeightedNetwork& net);

/// Checks symmetry, off-diagonal signs and row sums against an absolute
/// threshold tol*max(1, ||mat||_F). Never throws; diagnostics carry each
/// violated constraint with its worst offender.
LaplacianDiagnostics validate_laplacian(const Eigen::MatrixXd& mat, double tol);

/// L / trace(L). Errors when trace(L) <= 0 (empty network).
GraphLaplacian trace_normalize(const GraphLaplacian& L);

/// Frobenius distance ||L1 - L2||_F. Errors on dimension mismatch.
double euclidean_distance(const GraphLaplacian& L1, const GraphLaplacian& L2);

}  // namespace netreg
