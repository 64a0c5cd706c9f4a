#include "netreg/trend.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "netreg/format.hpp"
#include "netreg/tangent.hpp"

namespace netreg {

namespace {

// Embedded matrices F_alpha(L_i); pairwise Frobenius differences of these
// reproduce power_distance bitwise.
std::vector<Eigen::MatrixXd> embed_matrices(const NetworkDataset& data,
                                            const PowerConfig& power) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(data.n()));
  for (const GraphLaplacian& lap : data.responses()) {
    out.push_back(power_map(lap, power).matrix());
  }
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DistanceSeries consecutive_distances(const NetworkDataset& data,
                                     const PowerConfig& power) {
  if (data.n() < 2) {
    throw DataError("consecutive_distances: need at least two observations");
  }
  const std::vector<Eigen::MatrixXd> embedded = embed_matrices(data, power);
  DistanceSeries series;
  series.values.resize(data.n() - 1);
  for (Eigen::Index i = 0; i + 1 < data.n(); ++i) {
    series.values(i) = (embedded[static_cast<std::size_t>(i)] -
                        embedded[static_cast<std::size_t>(i + 1)])
                           .norm();
    series.labels.push_back(data.labels()[static_cast<std::size_t>(i + 1)]);
  }
  return series;
}

DistanceSeries residual_distances(const NetworkDataset& data,
                                  const CurveFit& fit, const PowerConfig& power) {
  if (static_cast<Eigen::Index>(fit.query_points.size()) != data.n()) {
    throw DataError("residual_distances: fit has " +
                    std::to_string(fit.query_points.size()) +
                    " points for n = " + std::to_string(data.n()));
  }
  for (std::size_t i = 0; i < fit.query_points.size(); ++i) {
    const bool same =
        fit.query_points[i].size() == data.covariates()[i].size() &&
        (fit.query_points[i].array() == data.covariates()[i].array()).all();
    if (!same) {
      throw DataError("residual_distances: fit grid point #" +
                      std::to_string(i + 1) +
                      " does not match the observed covariate");
    }
  }
  DistanceSeries series;
  series.labels = data.labels();
  series.values.resize(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    series.values(i) = power_distance(fit.fitted[static_cast<std::size_t>(i)],
                                      data.responses()[static_cast<std::size_t>(i)],
                                      power);
  }
  return series;
}

AnomalyRanking rank_anomalies(const DistanceSeries& series, std::size_t k) {
  const std::size_t n = static_cast<std::size_t>(series.values.size());
  if (n == 0) {
    throw DataError("rank_anomalies: empty series");
  }
  if (k > n) {
    throw DataError("rank_anomalies: k = " + std::to_string(k) +
                    " exceeds series length " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return series.values(static_cast<Eigen::Index>(a)) >
           series.values(static_cast<Eigen::Index>(b));
  });

  std::vector<double> values(series.values.data(), series.values.data() + n);
  const double med = median_of(values);
  std::vector<double> deviations;
  deviations.reserve(n);
  for (double v : values) deviations.push_back(std::abs(v - med));
  const double mad = median_of(std::move(deviations));

  AnomalyRanking out;
  out.threshold = med + 3.0 * mad;
  out.ranked.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t pos = order[r];
    out.ranked.push_back({series.labels[pos],
                          series.values(static_cast<Eigen::Index>(pos)), pos});
  }
  return out;
}

PcaModel pca_fit(const std::vector<Eigen::VectorXd>& tangent_vectors) {
  const Eigen::Index n = static_cast<Eigen::Index>(tangent_vectors.size());
  if (n < 2) {
    throw DataError("pca_fit: need at least two vectors");
  }
  const Eigen::Index d = tangent_vectors.front().size();
  for (const Eigen::VectorXd& v : tangent_vectors) {
    if (v.size() != d) {
      throw DataError("pca_fit: vectors have mixed dimensions");
    }
  }
  Eigen::MatrixXd rows(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    rows.row(i) = tangent_vectors[static_cast<std::size_t>(i)].transpose();
  }
  PcaModel model;
  model.mean = rows.colwise().mean().transpose();
  rows.rowwise() -= model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
  model.components = svd.matrixV();
  const Eigen::VectorXd singular = svd.singularValues();
  model.explained_variance.resize(singular.size());
  for (Eigen::Index i = 0; i < singular.size(); ++i) {
    model.explained_variance(i) =
        singular(i) * singular(i) / static_cast<double>(n - 1);
  }
  return model;
}

Eigen::MatrixXd pca_project(const PcaModel& model,
                            const std::vector<Eigen::VectorXd>& items,
                            Eigen::Index k) {
  if (k < 0 || k > model.components.cols()) {
    throw DataError("pca_project: k = " + std::to_string(k) + " exceeds " +
                    std::to_string(model.components.cols()) + " components");
  }
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(items.size()), k);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != model.mean.size()) {
      throw DataError("pca_project: item dimension mismatch");
    }
    scores.row(static_cast<Eigen::Index>(i)) =
        ((items[i] - model.mean).transpose() * model.components.leftCols(k));
  }
  return scores;
}

double estimate_rho_ls(const std::vector<Eigen::VectorXd>& ordered) {
  if (ordered.size() < 2) {
    throw DataError("estimate_rho_ls: need at least two vectors");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    if (ordered[k].size() != ordered[0].size()) {
      throw DataError("estimate_rho_ls: vectors have mixed dimensions");
    }
    num += ordered[k].dot(ordered[k - 1]);
    den += ordered[k - 1].dot(ordered[k - 1]);
  }
  if (den == 0.0) {
    throw DataError("estimate_rho_ls: all lagged vectors are zero");
  }
  return std::clamp(num / den, 1e-6, 1.0 - 1e-6);
}

namespace {

Eigen::MatrixXd pairwise_distance_matrix(const std::vector<Eigen::MatrixXd>& embedded) {
  const Eigen::Index n = static_cast<Eigen::Index>(embedded.size());
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      const double d = (embedded[static_cast<std::size_t>(k)] -
                        embedded[static_cast<std::size_t>(l)])
                           .norm();
      dist(k, l) = d;
      dist(l, k) = d;
    }
  }
  return dist;
}

Eigen::MatrixXd apply_ar1_factors(const Eigen::MatrixXd& dist, double rho) {
  const Eigen::Index n = dist.rows();
  Eigen::VectorXd factor(n);
  for (Eigen::Index lag = 0; lag < n; ++lag) {
    factor(lag) = std::sqrt((1.0 - rho) / std::pow(rho, static_cast<double>(lag)));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      const double v = factor(l - k) * dist(k, l);
      out(k, l) = v;
      out(l, k) = v;
    }
  }
  return out;
}

}  // namespace

double estimate_rho_pc1(const NetworkDataset& data,
                        const std::vector<double>& rho_grid,
                        const PowerConfig& power) {
  if (rho_grid.empty()) {
    throw DataError("estimate_rho_pc1: empty candidate grid");
  }
  for (double rho : rho_grid) {
    if (!(rho > 0.0 && rho < 1.0)) {
      throw DataError("estimate_rho_pc1: candidate rho " + format_double(rho) +
                      " outside (0,1)");
    }
  }
  if (data.n() < 2) {
    throw DataError("estimate_rho_pc1: need at least two observations");
  }
  std::vector<double> grid = rho_grid;
  std::sort(grid.begin(), grid.end());

  const std::vector<Eigen::MatrixXd> embedded = embed_matrices(data, power);
  const Eigen::MatrixXd base = pairwise_distance_matrix(embedded);

  double best_rho = 0.0;
  double best_fraction = -1.0;
  for (double rho : grid) {
    const MdsResult mds = classical_mds(apply_ar1_factors(base, rho), 1);
    const double scale = std::max(1.0, std::abs(mds.eigenvalues(0)));
    double positive_mass = 0.0;
    for (Eigen::Index i = 0; i < mds.eigenvalues.size(); ++i) {
      if (mds.eigenvalues(i) > 1e-12 * scale) positive_mass += mds.eigenvalues(i);
    }
    if (positive_mass <= 0.0) continue;  // degenerate configuration
    const double fraction = mds.eigenvalues(0) / positive_mass;
    if (fraction > best_fraction) {
      best_fraction = fraction;
      best_rho = rho;
    }
  }
  if (best_fraction < 0.0) {
    throw DataError("estimate_rho_pc1: degenerate configuration for every "
                    "candidate rho");
  }
  return best_rho;
}

Eigen::MatrixXd mahalanobis_distance_matrix(const NetworkDataset& data,
                                            double rho,
                                            const PowerConfig& power) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DataError("mahalanobis_distance_matrix: rho " + format_double(rho) +
                    " outside (0,1)");
  }
  const std::vector<Eigen::MatrixXd> embedded = embed_matrices(data, power);
  return apply_ar1_factors(pairwise_distance_matrix(embedded), rho);
}

MdsResult classical_mds(const Eigen::MatrixXd& distances, Eigen::Index k) {
  const Eigen::Index n = distances.rows();
  if (n == 0 || distances.cols() != n) {
    throw DataError("classical_mds: distance matrix must be square and nonempty");
  }
  if (k < 0) {
    throw DataError("classical_mds: k must be nonnegative");
  }
  double scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(distances(i, j)));
    }
  }
  const double tol = 1e-9 * scale;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(distances(i, i)) > tol) {
      throw DataError("classical_mds: nonzero diagonal at (" + std::to_string(i) +
                      "," + std::to_string(i) + ")");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(distances(i, j) - distances(j, i)) > tol) {
        throw DataError("classical_mds: asymmetric distances at (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (distances(i, j) < -tol) {
        throw DataError("classical_mds: negative distance at (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  // Double centering of -D^2/2.
  const Eigen::MatrixXd sq = distances.cwiseProduct(distances);
  const Eigen::VectorXd row_means = sq.rowwise().mean();
  const double grand_mean = row_means.mean();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = -0.5 * (sq(i, j) - row_means(i) - row_means(j) + grand_mean);
    }
  }
  gram = (0.5 * (gram + gram.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("classical_mds: eigensolver failed", 0.0, 0);
  }
  MdsResult out;
  out.eigenvalues = solver.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();

  const double eig_scale = std::max(1.0, std::abs(out.eigenvalues(0)));
  Eigen::Index positive = 0;
  while (positive < n && out.eigenvalues(positive) > 1e-12 * eig_scale) {
    ++positive;
  }
  const Eigen::Index keep = std::min(k, positive);
  out.truncated = positive < k;
  out.coordinates.resize(n, keep);
  for (Eigen::Index j = 0; j < keep; ++j) {
    out.coordinates.col(j) = vectors.col(j) * std::sqrt(out.eigenvalues(j));
  }
  return out;
}

}  // namespace netreg
