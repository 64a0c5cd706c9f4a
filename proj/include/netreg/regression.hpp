#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "netreg/laplacian.hpp"
#include "netreg/projection.hpp"
#include "netreg/spectral.hpp"
#include "netreg/tangent.hpp"

namespace netreg {

/// The estimator is undefined: every observation lies outside the kernel
/// support of the query. Cross-validation maps this to an infinite criterion
/// instead of propagating it.
class KernelSupportError : public DataError {
 public:
  using DataError::DataError;
};

/// Truncated Gaussian kernel: bandwidth h and support radius
/// c = truncation_multiple * h (the kernel is exactly zero beyond c).
struct KernelConfig {
  double h;
  double truncation_multiple;

  explicit KernelConfig(double bandwidth, double trunc = 10.0);
  double support_radius() const { return h * truncation_multiple; }
};

/// Paired covariates x_i in R^p and graph Laplacian responses L_i of common
/// node count, with one label per observation (labels default to "1".."n").
/// Observation order is preserved as given; time-series operations treat it
/// as the time order.
class NetworkDataset {
 public:
  NetworkDataset(std::vector<Eigen::VectorXd> covariates,
                 std::vector<GraphLaplacian> responses,
                 std::vector<std::string> labels = {});

  Eigen::Index n() const { return static_cast<Eigen::Index>(responses_.size()); }
  Eigen::Index m() const { return responses_.front().size(); }
  Eigen::Index p() const { return covariates_.front().size(); }

  const std::vector<Eigen::VectorXd>& covariates() const { return covariates_; }
  const std::vector<GraphLaplacian>& responses() const { return responses_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<Eigen::VectorXd> covariates_;
  std::vector<GraphLaplacian> responses_;
  std::vector<std::string> labels_;
};

/// A fitted regression curve: one estimated Laplacian per query point.
struct CurveFit {
  std::vector<Eigen::VectorXd> query_points;
  std::vector<GraphLaplacian> fitted;
  double alpha = 1.0;
  double h = 0.0;
};

/// Truncated Gaussian kernel value for offset u (or a precomputed distance).
double kernel_eval(const Eigen::VectorXd& u, const KernelConfig& cfg);
double kernel_eval(double distance, const KernelConfig& cfg);

/// Normalized kernel weights at x; nonnegative, summing to one. Errors when
/// every observation lies outside the kernel support (the estimator is
/// undefined there).
Eigen::VectorXd nw_weights(const Eigen::VectorXd& x,
                           const std::vector<Eigen::VectorXd>& covariates,
                           const KernelConfig& cfg);

/// Kernel-weighted average of the responses; stays in the Laplacian cone
/// without projection (convex combination in a convex cone).
GraphLaplacian nw_estimate_euclidean(const Eigen::VectorXd& x,
                                     const NetworkDataset& data,
                                     const KernelConfig& cfg);

/// Power-metric estimator: kernel-weighted average of tangent coordinates,
/// mapped back through the inverse power and cone projection. For alpha = 1
/// this agrees with nw_estimate_euclidean.
GraphLaplacian nw_estimate_power(const Eigen::VectorXd& x,
                                 const NetworkDataset& data,
                                 const KernelConfig& kernel,
                                 const PowerConfig& power,
                                 const ProjectionOptions& projection = {});

/// nw_estimate_power at each query point. A query point outside the kernel
/// support of every observation is an error naming the offending point.
CurveFit fit_curve(const std::vector<Eigen::VectorXd>& query_grid,
                   const NetworkDataset& data, const KernelConfig& kernel,
                   const PowerConfig& power,
                   const ProjectionOptions& projection = {});

struct BandwidthSelection {
  double best_h = 0.0;
  // (h, criterion) sorted by ascending h; +inf marks bandwidths for which
  // some leave-one-out estimate is undefined.
  std::vector<std::pair<double, double>> criterion;
};

/// Leave-one-out cross-validation: criterion(h) = sum_i d_alpha(L_i,
/// Lhat_{-i}(x_i; h))^2. Ties resolve to the smallest h. Errors when the
/// criterion is infinite for every candidate.
BandwidthSelection loocv_bandwidth(const NetworkDataset& data,
                                   std::vector<double> candidate_bandwidths,
                                   const PowerConfig& power,
                                   double truncation_multiple = 10.0,
                                   const ProjectionOptions& projection = {});

/// Reverse estimator: predicts the covariate of a network from kernel
/// weights on Laplacian distances d_alpha(L, L_i). The result lies in the
/// convex hull of the observed covariates.
Eigen::VectorXd reverse_nw(const GraphLaplacian& query,
                           const NetworkDataset& data,
                           const KernelConfig& kernel,
                           const PowerConfig& power);

}  // namespace netreg
