#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "netreg/regression.hpp"
#include "netreg/spectral.hpp"

namespace netreg {

/// A labelled series of nonnegative distances: length n-1 for consecutive
/// series (labelled by the later observation), n for residual series.
struct DistanceSeries {
  std::vector<std::string> labels;
  Eigen::VectorXd values;
};

/// d_alpha between consecutive observations, in dataset (time) order.
DistanceSeries consecutive_distances(const NetworkDataset& data,
                                     const PowerConfig& power);

/// d_alpha between each observation and the fitted value at its covariate.
/// The fit must have been evaluated exactly at the observed covariates.
DistanceSeries residual_distances(const NetworkDataset& data,
                                  const CurveFit& fit, const PowerConfig& power);

struct AnomalyRanking {
  struct Entry {
    std::string label;
    double value = 0.0;
    std::size_t position = 0;  // 0-based position in the input series
  };
  std::vector<Entry> ranked;  // descending by value, ties by earlier position
  double threshold = 0.0;     // median + 3*MAD, for flagging
};

AnomalyRanking rank_anomalies(const DistanceSeries& series, std::size_t k);

/// Principal components of tangent coordinates: mean, orthonormal component
/// columns and per-component variances in descending order.
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;         // d x r, orthonormal columns
  Eigen::VectorXd explained_variance; // descending, length r
};

PcaModel pca_fit(const std::vector<Eigen::VectorXd>& tangent_vectors);

/// Scores of items on the first k components: row i = componentsᵀ(v_i - mean).
Eigen::MatrixXd pca_project(const PcaModel& model,
                            const std::vector<Eigen::VectorXd>& items,
                            Eigen::Index k);

/// Isotropic AR(1) noise model for time-ordered tangent coordinates; sigma is
/// an overall scale fixed at 1.
struct Ar1Model {
  double rho = 0.5;
  double sigma = 1.0;
};

/// Least-squares lag-1 ratio sum_k y_kᵀv_k / sum_k v_kᵀv_k (y the vector at
/// time k, v its predecessor), clamped into [1e-6, 1-1e-6].
double estimate_rho_ls(const std::vector<Eigen::VectorXd>& ordered);

/// Picks the candidate rho whose Mahalanobis MDS configuration puts the
/// largest variance fraction on its first axis; ties resolve to smaller rho.
double estimate_rho_pc1(const NetworkDataset& data,
                        const std::vector<double>& rho_grid,
                        const PowerConfig& power);

/// Entry (k,l) = sqrt((1-rho)/rho^|k-l|) * d_alpha(L_k, L_l) over the dataset
/// in time order. Zero diagonal, symmetric.
Eigen::MatrixXd mahalanobis_distance_matrix(const NetworkDataset& data,
                                            double rho,
                                            const PowerConfig& power);

struct MdsResult {
  Eigen::MatrixXd coordinates;  // n x min(k, #positive eigenvalues)
  Eigen::VectorXd eigenvalues;  // all n, descending, negatives included
  bool truncated = false;       // fewer than k positive eigenvalues
};

/// Classical (Torgerson) multidimensional scaling: double-center -D²/2,
/// eigendecompose, scale eigenvectors of positive eigenvalues. Negative
/// eigenvalues are reported, never silently dropped.
MdsResult classical_mds(const Eigen::MatrixXd& distances, Eigen::Index k);

}  // namespace netreg
