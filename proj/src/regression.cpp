#include "netreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "netreg/format.hpp"

namespace netreg {

namespace {

std::string format_point(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i > 0) os << ", ";
    os << format_double(x(i));
  }
  os << ")";
  return os.str();
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// Canonical summation order: indices sorted by covariate (lexicographic),
// stable in the original index on ties. Estimates accumulate in this order so
// that reordering a dataset cannot change any result.
std::vector<std::size_t> covariate_order(const std::vector<Eigen::VectorXd>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(xs[a], xs[b]);
  });
  return order;
}

// Tangent coordinates of every response, indexed like the dataset.
std::vector<Eigen::VectorXd> embed_responses(const NetworkDataset& data,
                                             const PowerConfig& power) {
  std::vector<Eigen::VectorXd> embedded;
  embedded.reserve(static_cast<std::size_t>(data.n()));
  for (const GraphLaplacian& lap : data.responses()) {
    embedded.push_back(to_tangent(lap, power).coords);
  }
  return embedded;
}

// Kernel values per observation and their sum accumulated in canonical
// order. skip marks an excluded observation (leave-one-out), or SIZE_MAX.
struct KernelMass {
  Eigen::VectorXd values;
  double total = 0.0;
};

KernelMass kernel_mass(const Eigen::VectorXd& x,
                       const std::vector<Eigen::VectorXd>& covariates,
                       const std::vector<std::size_t>& order,
                       const KernelConfig& cfg, std::size_t skip) {
  KernelMass mass;
  mass.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(covariates.size()));
  for (std::size_t idx : order) {
    if (idx == skip) continue;
    const Eigen::Index i = static_cast<Eigen::Index>(idx);
    if (covariates[idx].size() != x.size()) {
      throw DataError("nw_weights: covariate dimension mismatch");
    }
    const double k = kernel_eval(x - covariates[idx], cfg);
    mass.values(i) = k;
    mass.total += k;
  }
  return mass;
}

// Weighted affine combination accumulated in canonical order, anchored at the
// first positive-weight observation so that constant data reproduces exactly.
template <typename Value, typename Getter>
Value anchored_average(const KernelMass& mass,
                       const std::vector<std::size_t>& order, std::size_t skip,
                       Getter&& value_of) {
  std::size_t anchor = order.size();
  for (std::size_t idx : order) {
    if (idx == skip) continue;
    if (mass.values(static_cast<Eigen::Index>(idx)) > 0.0) {
      anchor = idx;
      break;
    }
  }
  Value acc = value_of(anchor);
  for (std::size_t idx : order) {
    if (idx == skip || idx == anchor) continue;
    const double w = mass.values(static_cast<Eigen::Index>(idx)) / mass.total;
    if (w != 0.0) acc += w * (value_of(idx) - value_of(anchor));
  }
  return acc;
}

}  // namespace

KernelConfig::KernelConfig(double bandwidth, double trunc)
    : h(bandwidth), truncation_multiple(trunc) {
  if (!std::isfinite(h) || h <= 0.0) {
    throw DataError("KernelConfig: bandwidth must be a finite positive real, got " +
                    format_double(h));
  }
  if (!std::isfinite(truncation_multiple) || truncation_multiple <= 0.0) {
    throw DataError("KernelConfig: truncation_multiple must be positive, got " +
                    format_double(truncation_multiple));
  }
}

NetworkDataset::NetworkDataset(std::vector<Eigen::VectorXd> covariates,
                               std::vector<GraphLaplacian> responses,
                               std::vector<std::string> labels)
    : covariates_(std::move(covariates)),
      responses_(std::move(responses)),
      labels_(std::move(labels)) {
  if (responses_.empty() || covariates_.size() != responses_.size()) {
    throw DataError("NetworkDataset: need n >= 1 paired covariates and responses");
  }
  const Eigen::Index m = responses_.front().size();
  for (const GraphLaplacian& lap : responses_) {
    if (lap.size() != m) {
      throw DataError("NetworkDataset: responses have mixed node counts");
    }
  }
  const Eigen::Index p = covariates_.front().size();
  if (p < 1) {
    throw DataError("NetworkDataset: covariates must have dimension >= 1");
  }
  for (const Eigen::VectorXd& x : covariates_) {
    if (x.size() != p) {
      throw DataError("NetworkDataset: covariates have mixed dimensions");
    }
    if (!x.allFinite()) {
      throw DataError("NetworkDataset: non-finite covariate");
    }
  }
  if (labels_.empty()) {
    labels_.reserve(covariates_.size());
    for (std::size_t i = 0; i < covariates_.size(); ++i) {
      labels_.push_back(std::to_string(i + 1));
    }
  } else if (labels_.size() != covariates_.size()) {
    throw DataError("NetworkDataset: label count does not match n");
  }
  std::set<std::string> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) {
      throw DataError("NetworkDataset: duplicate label '" + label + "'");
    }
  }
}

double kernel_eval(double distance, const KernelConfig& cfg) {
  if (!std::isfinite(distance)) {
    throw DataError("kernel_eval: non-finite distance");
  }
  if (distance > cfg.support_radius()) return 0.0;
  const double coef = 1.0 / (cfg.h * std::sqrt(2.0 * std::numbers::pi));
  const double z = distance / cfg.h;
  return coef * std::exp(-0.5 * z * z);
}

double kernel_eval(const Eigen::VectorXd& u, const KernelConfig& cfg) {
  if (!u.allFinite()) {
    throw DataError("kernel_eval: non-finite offset");
  }
  return kernel_eval(u.norm(), cfg);
}

Eigen::VectorXd nw_weights(const Eigen::VectorXd& x,
                           const std::vector<Eigen::VectorXd>& covariates,
                           const KernelConfig& cfg) {
  if (covariates.empty()) {
    throw DataError("nw_weights: empty covariate list");
  }
  std::vector<std::size_t> order(covariates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const KernelMass mass = kernel_mass(x, covariates, order, cfg, order.size());
  if (mass.total <= 0.0) {
    throw KernelSupportError("nw_weights: query outside kernel support at x = " +
                             format_point(x));
  }
  return mass.values / mass.total;
}

GraphLaplacian nw_estimate_euclidean(const Eigen::VectorXd& x,
                                     const NetworkDataset& data,
                                     const KernelConfig& cfg) {
  const std::vector<std::size_t> order = covariate_order(data.covariates());
  const KernelMass mass =
      kernel_mass(x, data.covariates(), order, cfg, order.size());
  if (mass.total <= 0.0) {
    throw KernelSupportError(
        "nw_estimate_euclidean: query outside kernel support at x = " +
        format_point(x));
  }
  Eigen::MatrixXd avg = anchored_average<Eigen::MatrixXd>(
      mass, order, order.size(),
      [&](std::size_t i) { return data.responses()[i].matrix(); });
  return GraphLaplacian::unchecked(std::move(avg));
}

namespace {

GraphLaplacian power_estimate(const Eigen::VectorXd& x,
                              const NetworkDataset& data,
                              const std::vector<Eigen::VectorXd>& embedded,
                              const std::vector<std::size_t>& order,
                              const KernelConfig& kernel,
                              const PowerConfig& power,
                              const ProjectionOptions& projection,
                              std::size_t skip, const char* who) {
  const KernelMass mass = kernel_mass(x, data.covariates(), order, kernel, skip);
  if (mass.total <= 0.0) {
    throw KernelSupportError(std::string(who) +
                             ": query outside kernel support at x = " +
                             format_point(x));
  }
  Eigen::VectorXd avg = anchored_average<Eigen::VectorXd>(
      mass, order, skip, [&](std::size_t i) { return embedded[i]; });
  return pipeline_to_laplacian(
      TangentVector(std::move(avg), data.m(), power.alpha), projection);
}

}  // namespace

GraphLaplacian nw_estimate_power(const Eigen::VectorXd& x,
                                 const NetworkDataset& data,
                                 const KernelConfig& kernel,
                                 const PowerConfig& power,
                                 const ProjectionOptions& projection) {
  const std::vector<std::size_t> order = covariate_order(data.covariates());
  const std::vector<Eigen::VectorXd> embedded = embed_responses(data, power);
  return power_estimate(x, data, embedded, order, kernel, power, projection,
                        embedded.size(), "nw_estimate_power");
}

CurveFit fit_curve(const std::vector<Eigen::VectorXd>& query_grid,
                   const NetworkDataset& data, const KernelConfig& kernel,
                   const PowerConfig& power,
                   const ProjectionOptions& projection) {
  const std::vector<std::size_t> order = covariate_order(data.covariates());
  const std::vector<Eigen::VectorXd> embedded = embed_responses(data, power);
  CurveFit fit;
  fit.query_points = query_grid;
  fit.alpha = power.alpha;
  fit.h = kernel.h;
  fit.fitted.reserve(query_grid.size());
  for (std::size_t g = 0; g < query_grid.size(); ++g) {
    try {
      fit.fitted.push_back(power_estimate(query_grid[g], data, embedded, order,
                                          kernel, power, projection,
                                          embedded.size(), "fit_curve"));
    } catch (const DataError& err) {
      throw DataError("fit_curve: grid point #" + std::to_string(g + 1) + " at " +
                      format_point(query_grid[g]) + ": " + err.what());
    }
  }
  return fit;
}

BandwidthSelection loocv_bandwidth(const NetworkDataset& data,
                                   std::vector<double> candidate_bandwidths,
                                   const PowerConfig& power,
                                   double truncation_multiple,
                                   const ProjectionOptions& projection) {
  if (data.n() < 2) {
    throw DataError("loocv_bandwidth: need at least two observations");
  }
  if (candidate_bandwidths.empty()) {
    throw DataError("loocv_bandwidth: empty candidate list");
  }
  std::sort(candidate_bandwidths.begin(), candidate_bandwidths.end());

  const std::vector<std::size_t> order = covariate_order(data.covariates());
  const std::vector<Eigen::VectorXd> embedded = embed_responses(data, power);
  const double inf = std::numeric_limits<double>::infinity();

  BandwidthSelection out;
  out.best_h = 0.0;
  double best_value = inf;
  for (double h : candidate_bandwidths) {
    const KernelConfig kernel(h, truncation_multiple);
    double criterion = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(data.n()); ++i) {
      double dist;
      try {
        const GraphLaplacian held_out =
            power_estimate(data.covariates()[i], data, embedded, order, kernel,
                           power, projection, i, "loocv_bandwidth");
        dist = power_distance(data.responses()[i], held_out, power);
      } catch (const KernelSupportError&) {
        criterion = inf;  // the held-out estimator is undefined at x_i
        break;
      }
      criterion += dist * dist;
    }
    out.criterion.emplace_back(h, criterion);
    if (criterion < best_value) {
      best_value = criterion;
      out.best_h = h;
    }
  }
  if (!std::isfinite(best_value)) {
    throw DataError("loocv_bandwidth: no feasible bandwidth (criterion infinite "
                    "for every candidate)");
  }
  return out;
}

Eigen::VectorXd reverse_nw(const GraphLaplacian& query,
                           const NetworkDataset& data,
                           const KernelConfig& kernel,
                           const PowerConfig& power) {
  if (query.size() != data.m()) {
    throw DataError("reverse_nw: node count mismatch (" +
                    std::to_string(query.size()) + " vs " +
                    std::to_string(data.m()) + ")");
  }
  const std::vector<std::size_t> order = covariate_order(data.covariates());
  const Eigen::MatrixXd query_embedded = power_map(query, power).matrix();

  KernelMass mass;
  mass.values = Eigen::VectorXd::Zero(data.n());
  for (std::size_t idx : order) {
    const Eigen::Index i = static_cast<Eigen::Index>(idx);
    const double dist =
        (query_embedded - power_map(data.responses()[idx], power).matrix()).norm();
    const double k = kernel_eval(dist, kernel);
    mass.values(i) = k;
    mass.total += k;
  }
  if (mass.total <= 0.0) {
    throw KernelSupportError(
        "reverse_nw: no observation within kernel support of the query network");
  }
  return anchored_average<Eigen::VectorXd>(
      mass, order, order.size(),
      [&](std::size_t i) { return data.covariates()[i]; });
}

}  // namespace netreg
