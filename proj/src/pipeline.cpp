#include "netreg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "netreg/format.hpp"
#include "netreg/projection.hpp"
#include "netreg/tangent.hpp"

namespace netreg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string padded_index(std::size_t index, std::size_t count) {
  std::size_t width = 3;
  std::size_t scale = 1000;
  while (count > scale) {
    ++width;
    scale *= 10;
  }
  std::string digits = std::to_string(index);
  while (digits.size() < width) digits.insert(digits.begin(), '0');
  return digits;
}

std::string fnv1a_of_string(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(hex);
}

std::vector<std::string> index_labels(std::size_t count) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) labels.push_back(std::to_string(i));
  return labels;
}

void write_cv_table(const std::filesystem::path& path,
                    const std::vector<std::pair<double, double>>& table) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("run_pipeline: cannot open '" + path.string() +
                    "' for writing");
  }
  out << "h\tcriterion\n";
  for (const auto& [h, crit] : table) {
    out << format_double(h) << "\t" << format_double(crit) << "\n";
  }
}

void write_eigenvalues(const std::filesystem::path& path,
                       const Eigen::VectorXd& values) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("run_pipeline: cannot open '" + path.string() +
                    "' for writing");
  }
  out << "index\teigenvalue\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << (i + 1) << "\t" << format_double(values(i)) << "\n";
  }
}

void write_anomalies(const std::filesystem::path& path,
                     const AnomalyRanking& ranking) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("run_pipeline: cannot open '" + path.string() +
                    "' for writing");
  }
  out << "rank\tlabel\tresidual\tflagged\n";
  for (std::size_t r = 0; r < ranking.ranked.size(); ++r) {
    const auto& entry = ranking.ranked[r];
    out << (r + 1) << "\t" << entry.label << "\t" << format_double(entry.value)
        << "\t" << (entry.value > ranking.threshold ? 1 : 0) << "\n";
  }
}

}  // namespace

RunSummary run_pipeline(const RunConfig& config,
                        const std::filesystem::path& manifest_path) {
  if (config.output_dir.empty()) {
    throw DataError("run_pipeline: output_dir must be set");
  }
  if (config.bandwidth && !(*config.bandwidth > 0.0)) {
    throw DataError("run_pipeline: bandwidth must be positive");
  }
  if (config.rho_method == RhoMethod::fixed) {
    if (!config.rho_fixed || !(*config.rho_fixed > 0.0 && *config.rho_fixed < 1.0)) {
      throw DataError("run_pipeline: rho_method 'fixed' needs rho_fixed in (0,1)");
    }
  }
  if (config.mds_dims < 1 || config.pca_components < 1) {
    throw DataError("run_pipeline: mds_dims and pca_components must be >= 1");
  }
  const PowerConfig power(config.alpha);
  const ProjectionOptions projection{config.projection_tol,
                                     config.projection_max_iter};

  const DatasetManifest manifest = load_manifest(manifest_path);
  const NetworkDataset data = load_dataset(manifest);
  if (data.p() != 1) {
    throw DataError("run_pipeline: the full pipeline handles scalar covariates "
                    "only (p = " + std::to_string(data.p()) + "); use the "
                    "library API for multivariate covariates");
  }
  if (data.n() < 2) {
    throw DataError("run_pipeline: need at least two observations");
  }
  const std::size_t n = static_cast<std::size_t>(data.n());

  // Input digests, in manifest entry order.
  const std::string manifest_digest = file_digest(manifest_path);
  std::vector<std::pair<std::string, std::string>> network_digests;
  std::string combined = manifest_digest;
  for (const ManifestEntry& entry : manifest.entries) {
    const std::filesystem::path net_path =
        std::filesystem::path(entry.network_path).is_absolute()
            ? std::filesystem::path(entry.network_path)
            : manifest.base_dir / entry.network_path;
    network_digests.emplace_back(entry.network_path, file_digest(net_path));
    combined += network_digests.back().second;
  }
  const std::string combined_digest = fnv1a_of_string(combined);

  // Covariate standardization (fitting units vs original units).
  double shift = 0.0;
  double scale = 1.0;
  if (config.standardize) {
    double mean = 0.0;
    for (const auto& x : data.covariates()) mean += x(0);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& x : data.covariates()) {
      var += (x(0) - mean) * (x(0) - mean);
    }
    var /= static_cast<double>(n - 1);
    if (!(var > 0.0)) {
      throw DataError("run_pipeline: constant covariate cannot be standardized");
    }
    shift = mean;
    scale = std::sqrt(var);
  }
  auto to_fitting_units = [&](double x) {
    return config.standardize ? (x - shift) / scale : x;
  };
  std::vector<Eigen::VectorXd> fit_covariates;
  fit_covariates.reserve(n);
  for (const auto& x : data.covariates()) {
    Eigen::VectorXd v(1);
    v(0) = to_fitting_units(x(0));
    fit_covariates.push_back(v);
  }
  const NetworkDataset fit_data(fit_covariates, data.responses(), data.labels());

  RunSummary summary;
  summary.n = data.n();
  summary.m = data.m();

  // Bandwidth: fixed or by cross-validation.
  std::vector<double> cv_grid;
  if (!config.bandwidth) {
    cv_grid = config.cv_grid;
    if (cv_grid.empty()) {
      double sd = 1.0;
      if (!config.standardize) {
        double mean = 0.0;
        for (const auto& x : fit_covariates) mean += x(0);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& x : fit_covariates) {
          var += (x(0) - mean) * (x(0) - mean);
        }
        var /= static_cast<double>(n - 1);
        sd = var > 0.0 ? std::sqrt(var) : 1.0;
      }
      cv_grid = {0.5 * sd, 1.0 * sd, 2.0 * sd, 4.0 * sd, 8.0 * sd};
    }
    const BandwidthSelection selection = loocv_bandwidth(
        fit_data, cv_grid, power, config.truncation_multiple, projection);
    summary.bandwidth_used = selection.best_h;
    summary.bandwidth_from_cv = true;
    summary.cv_table = selection.criterion;
  } else {
    summary.bandwidth_used = *config.bandwidth;
    summary.bandwidth_from_cv = false;
  }
  const KernelConfig kernel(summary.bandwidth_used, config.truncation_multiple);

  // Query grid in original units.
  std::vector<double> grid_values = config.query_grid;
  if (grid_values.empty()) {
    double lo = data.covariates().front()(0);
    double hi = lo;
    for (const auto& x : data.covariates()) {
      lo = std::min(lo, x(0));
      hi = std::max(hi, x(0));
    }
    const int points = 20;
    for (int i = 0; i < points; ++i) {
      grid_values.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(points - 1));
    }
  }
  std::vector<Eigen::VectorXd> query_grid;
  query_grid.reserve(grid_values.size());
  for (double x : grid_values) {
    Eigen::VectorXd v(1);
    v(0) = to_fitting_units(x);
    query_grid.push_back(v);
  }

  // Fits: the display curve over the grid and the fit at the observations.
  const CurveFit curve = fit_curve(query_grid, fit_data, kernel, power, projection);
  const CurveFit at_observations =
      fit_curve(fit_covariates, fit_data, kernel, power, projection);

  const DistanceSeries consecutive = consecutive_distances(fit_data, power);
  const DistanceSeries residuals =
      residual_distances(fit_data, at_observations, power);
  summary.anomalies = rank_anomalies(residuals, n);

  // Tangent coordinates for PCA and the AR(1) estimates.
  std::vector<Eigen::VectorXd> observation_tangents;
  observation_tangents.reserve(n);
  for (const GraphLaplacian& lap : data.responses()) {
    observation_tangents.push_back(to_tangent(lap, power).coords);
  }
  std::vector<Eigen::VectorXd> curve_tangents;
  curve_tangents.reserve(curve.fitted.size());
  for (const GraphLaplacian& lap : curve.fitted) {
    curve_tangents.push_back(to_tangent(lap, power).coords);
  }

  const PcaModel pca = pca_fit(observation_tangents);
  const Eigen::Index pca_k =
      std::min<Eigen::Index>(config.pca_components, pca.components.cols());
  const Eigen::MatrixXd pca_obs_scores =
      pca_project(pca, observation_tangents, pca_k);
  const Eigen::MatrixXd pca_curve_scores = pca_project(pca, curve_tangents, pca_k);

  summary.rho_ls = estimate_rho_ls(observation_tangents);
  std::vector<double> rho_grid = config.rho_grid;
  if (rho_grid.empty()) {
    for (int i = 1; i <= 19; ++i) rho_grid.push_back(0.05 * i);
  }
  summary.rho_pc1 = estimate_rho_pc1(fit_data, rho_grid, power);
  summary.rho_fixed = config.rho_method == RhoMethod::fixed
                          ? config.rho_fixed
                          : std::optional<double>();

  // Write artifacts.
  const std::filesystem::path out_dir(config.output_dir);
  std::filesystem::create_directories(out_dir);
  std::filesystem::create_directories(out_dir / "curve");
  std::vector<std::string> outputs;

  {
    std::ofstream out(out_dir / "query_points.tsv");
    if (!out) {
      throw DataError("run_pipeline: cannot write query_points.tsv");
    }
    out << "index\tx\n";
    for (std::size_t i = 0; i < grid_values.size(); ++i) {
      out << (i + 1) << "\t" << format_double(grid_values[i]) << "\n";
    }
    outputs.push_back("query_points.tsv");
  }
  for (std::size_t g = 0; g < curve.fitted.size(); ++g) {
    const std::string name =
        "curve/fitted_" + padded_index(g + 1, curve.fitted.size()) + ".txt";
    write_matrix(out_dir / name, curve.fitted[g].matrix());
    outputs.push_back(name);
  }
  write_series(out_dir / "consecutive_distances.tsv", "distance", consecutive);
  outputs.push_back("consecutive_distances.tsv");
  write_series(out_dir / "residual_distances.tsv", "distance", residuals);
  outputs.push_back("residual_distances.tsv");
  write_anomalies(out_dir / "anomalies.tsv", summary.anomalies);
  outputs.push_back("anomalies.tsv");

  write_scores(out_dir / "pca_observations.tsv", data.labels(), pca_obs_scores,
               "pc");
  outputs.push_back("pca_observations.tsv");
  write_scores(out_dir / "pca_curve.tsv", index_labels(curve_tangents.size()),
               pca_curve_scores, "pc");
  outputs.push_back("pca_curve.tsv");
  write_eigenvalues(out_dir / "pca_explained_variance.tsv",
                    pca.explained_variance);
  outputs.push_back("pca_explained_variance.tsv");

  struct MdsJob {
    std::string name;
    double rho;
  };
  std::vector<MdsJob> jobs = {{"ls", summary.rho_ls}, {"pc1", summary.rho_pc1}};
  if (summary.rho_fixed) jobs.push_back({"fixed", *summary.rho_fixed});
  for (const MdsJob& job : jobs) {
    const Eigen::MatrixXd dist =
        mahalanobis_distance_matrix(fit_data, job.rho, power);
    const MdsResult mds = classical_mds(dist, config.mds_dims);
    write_scores(out_dir / ("mds_" + job.name + "_coordinates.tsv"),
                 data.labels(), mds.coordinates, "axis");
    outputs.push_back("mds_" + job.name + "_coordinates.tsv");
    write_eigenvalues(out_dir / ("mds_" + job.name + "_eigenvalues.tsv"),
                      mds.eigenvalues);
    outputs.push_back("mds_" + job.name + "_eigenvalues.tsv");
  }

  if (summary.bandwidth_from_cv) {
    write_cv_table(out_dir / "cv_table.tsv", summary.cv_table);
    outputs.push_back("cv_table.tsv");
  }

  // Metadata record: everything needed to reproduce this run byte for byte.
  ordered_json meta;
  meta["tool"] = "netreg";
  meta["alpha"] = config.alpha;
  ordered_json bw;
  bw["mode"] = summary.bandwidth_from_cv ? "cv" : "fixed";
  bw["value"] = summary.bandwidth_used;
  if (summary.bandwidth_from_cv) {
    ordered_json grid = ordered_json::array();
    ordered_json criteria = ordered_json::array();
    for (const auto& [h, crit] : summary.cv_table) {
      grid.push_back(h);
      criteria.push_back(format_double(crit));  // string: criteria may be inf
    }
    bw["cv_grid"] = grid;
    bw["cv_criteria"] = criteria;
  }
  meta["bandwidth"] = bw;
  meta["truncation_multiple"] = config.truncation_multiple;
  ordered_json projection_meta;
  projection_meta["tol"] = config.projection_tol;
  projection_meta["max_iter"] = config.projection_max_iter > 0
                                    ? config.projection_max_iter
                                    : 50 * static_cast<long>(data.m()) *
                                          static_cast<long>(data.m());
  meta["projection"] = projection_meta;
  meta["query_grid"] = grid_values;
  ordered_json standardize;
  standardize["enabled"] = config.standardize;
  if (config.standardize) {
    standardize["mean"] = shift;
    standardize["sd"] = scale;
  }
  meta["standardize"] = standardize;
  meta["normalization"] =
      manifest.normalization == Normalization::trace ? "trace" : "none";
  ordered_json rho;
  rho["method"] = config.rho_method == RhoMethod::ls
                      ? "ls"
                      : (config.rho_method == RhoMethod::pc1grid ? "pc1grid"
                                                                 : "fixed");
  rho["ls"] = summary.rho_ls;
  rho["pc1"] = summary.rho_pc1;
  rho["pc1_grid"] = rho_grid;
  if (summary.rho_fixed) rho["fixed"] = *summary.rho_fixed;
  meta["rho"] = rho;
  meta["mds_dims"] = config.mds_dims;
  meta["pca_components"] = static_cast<int>(pca_k);
  meta["anomaly_threshold"] = summary.anomalies.threshold;
  ordered_json inputs;
  inputs["manifest"] = {{"path", manifest_path.string()},
                        {"digest", manifest_digest}};
  ordered_json nets = ordered_json::array();
  for (std::size_t i = 0; i < network_digests.size(); ++i) {
    nets.push_back({{"path", network_digests[i].first},
                    {"label", manifest.entries[i].label},
                    {"digest", network_digests[i].second}});
  }
  inputs["networks"] = nets;
  inputs["combined_digest"] = combined_digest;
  meta["inputs"] = inputs;
  ordered_json dataset;
  dataset["n"] = static_cast<long>(data.n());
  dataset["m"] = static_cast<long>(data.m());
  dataset["p"] = static_cast<long>(data.p());
  dataset["labels"] = data.labels();
  meta["dataset"] = dataset;
  meta["outputs"] = outputs;

  {
    std::ofstream out(out_dir / "run_metadata.json");
    if (!out) {
      throw DataError("run_pipeline: cannot write run_metadata.json");
    }
    out << meta.dump(2) << "\n";
  }

  summary.output_dir = out_dir;
  return summary;
}

}  // namespace netreg
