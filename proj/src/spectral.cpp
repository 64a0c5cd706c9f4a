#include "netreg/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "netreg/format.hpp"

namespace netreg {

PowerConfig::PowerConfig(double a, double floor) : alpha(a), eigenvalue_floor(floor) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw DataError("PowerConfig: alpha must be a finite positive real, got " +
                    format_double(alpha));
  }
  if (!std::isfinite(eigenvalue_floor) || eigenvalue_floor < 0.0) {
    throw DataError("PowerConfig: eigenvalue_floor must be >= 0, got " +
                    format_double(eigenvalue_floor));
  }
}

SpectralDecomposition spectral_decompose(const SymmetricMatrix& mat) {
  if (!mat.matrix().allFinite()) {
    throw DataError("spectral_decompose: non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat.matrix());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("spectral_decompose: eigensolver failed", 0.0, 0);
  }
  // Eigen returns ascending order; flip to descending.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

namespace {

SymmetricMatrix reconstruct(const SpectralDecomposition& dec,
                            const Eigen::VectorXd& powered) {
  Eigen::MatrixXd out =
      dec.eigenvectors * powered.asDiagonal() * dec.eigenvectors.transpose();
  return SymmetricMatrix(std::move(out));
}

}  // namespace

SymmetricMatrix power_map(const GraphLaplacian& L, const PowerConfig& cfg) {
  SpectralDecomposition dec = spectral_decompose(SymmetricMatrix(L.matrix()));
  const double min_eig = dec.eigenvalues(dec.eigenvalues.size() - 1);
  if (min_eig < -1e-6 * L.matrix().norm()) {
    throw DataError("power_map: input not positive semi-definite (eigenvalue " +
                    format_double(min_eig) + ")");
  }
  // Eigenvalues within the roundoff window of zero are exact zeros of the
  // Laplacian; powering their numerical residue by alpha < 1 would amplify
  // it (sqrt(1e-16) = 1e-8) and break null-vector preservation.
  const double roundoff = 1e-10 * L.matrix().norm();
  Eigen::VectorXd powered(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    const double clamped =
        dec.eigenvalues(i) <= roundoff ? 0.0 : dec.eigenvalues(i);
    powered(i) = std::pow(clamped, cfg.alpha);
  }
  return reconstruct(dec, powered);
}

SymmetricMatrix inverse_power_map(const SymmetricMatrix& mat, const PowerConfig& cfg) {
  if (!mat.matrix().allFinite()) {
    throw DataError("inverse_power_map: non-finite entries");
  }
  SpectralDecomposition dec = spectral_decompose(mat);
  // Same roundoff window as power_map, so that structural zeros survive the
  // 1/alpha powering; the user floor sits on top of it.
  const double floor =
      std::max(cfg.eigenvalue_floor, 1e-10 * mat.matrix().norm());
  Eigen::VectorXd powered(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    const double clamped = dec.eigenvalues(i) <= floor ? 0.0 : dec.eigenvalues(i);
    powered(i) = std::pow(clamped, 1.0 / cfg.alpha);
  }
  return reconstruct(dec, powered);
}

double power_distance(const GraphLaplacian& L1, const GraphLaplacian& L2,
                      const PowerConfig& cfg) {
  if (L1.size() != L2.size()) {
    throw DataError("power_distance: dimension mismatch (" +
                    std::to_string(L1.size()) + " vs " +
                    std::to_string(L2.size()) + ")");
  }
  return (power_map(L1, cfg).matrix() - power_map(L2, cfg).matrix()).norm();
}

}  // namespace netreg
