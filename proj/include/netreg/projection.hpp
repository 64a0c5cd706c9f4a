#pragma once

#include <Eigen/Core>

#include "netreg/laplacian.hpp"
#include "netreg/tangent.hpp"

namespace netreg {

struct ProjectionResult {
  GraphLaplacian laplacian;
  double objective = 0.0;     // ||input - laplacian||_F^2
  long iterations = 0;
  double kkt_residual = 0.0;  // max complementarity/stationarity violation
};

/// Stopping controls for the cone projection. max_iter = 0 requests the
/// default budget 50*m*m.
struct ProjectionOptions {
  double tol = 1e-8;
  long max_iter = 0;
};

/// Thrown when the projection solver exhausts its iteration budget; carries
/// the best iterate found so far.
class ProjectionConvergenceError : public ConvergenceError {
 public:
  ProjectionConvergenceError(const std::string& what, double residual,
                             long iterations, GraphLaplacian best)
      : ConvergenceError(what, residual, iterations), best_(std::move(best)) {}

  const GraphLaplacian& best_iterate() const { return best_; }

 private:
  GraphLaplacian best_;
};

/// Projects a symmetric matrix to the nearest graph Laplacian in Frobenius
/// distance. Candidates are parameterized by nonnegative edge weights a_ij
/// (l_ij = -a_ij for i<j, l_ii = sum_j a_ij), which makes the problem a
/// strictly convex nonnegative least squares with a unique minimizer.
/// Solved by Lawson-Hanson style active sets for moderate sizes and by an
/// accelerated projected gradient with known curvature constants above that;
/// both stop at KKT residual <= tol: gradient >= -tol where a_ij = 0 and
/// |gradient| <= tol where a_ij > 0.
///
/// max_iter = 0 requests the default budget 50*m*m. On exhaustion throws
/// ProjectionConvergenceError with the best iterate and its residual.
ProjectionResult project_to_laplacian(const SymmetricMatrix& mat,
                                      double tol = 1e-8, long max_iter = 0);

/// The composite return map from tangent coordinates to graph Laplacian
/// space: invert the half-vectorization, reverse the power, then project.
GraphLaplacian pipeline_to_laplacian(const TangentVector& v,
                                     const ProjectionOptions& options = {});

}  // namespace netreg
