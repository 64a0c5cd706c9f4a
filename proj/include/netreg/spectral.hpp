#pragma once

#include <Eigen/Core>

#include "netreg/laplacian.hpp"

namespace netreg {

/// Embedding power alpha > 0 and the eigenvalue floor used when reversing
/// the power (eigenvalues below the floor are clamped to zero).
struct PowerConfig {
  double alpha = 1.0;
  double eigenvalue_floor = 0.0;

  explicit PowerConfig(double a = 1.0, double floor = 0.0);
};

/// Eigendecomposition with eigenvalues in descending order; column i of
/// `eigenvectors` pairs with eigenvalues[i].
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

SpectralDecomposition spectral_decompose(const SymmetricMatrix& mat);

/// F_alpha(L) = U diag(xi^alpha) Uᵀ. Negative roundoff eigenvalues are
/// clamped to zero before powering; an eigenvalue below -1e-6*||L||_F is an
/// error ("input not positive semi-definite").
SymmetricMatrix power_map(const GraphLaplacian& L, const PowerConfig& cfg);

/// Reverses the power: eigenvalues below cfg.eigenvalue_floor are clamped to
/// zero, the rest are raised to 1/alpha. Accepts indefinite input (tangent
/// averages can leave the embedded image).
SymmetricMatrix inverse_power_map(const SymmetricMatrix& mat, const PowerConfig& cfg);

/// Power Euclidean distance ||F_alpha(L1) - F_alpha(L2)||_F.
double power_distance(const GraphLaplacian& L1, const GraphLaplacian& L2,
                      const PowerConfig& cfg);

}  // namespace netreg
