// netreg: kernel regression and trend analysis for graph-Laplacian-valued
// network time series. Subcommands cover validation, distance series,
// curve fitting, bandwidth cross-validation, forward/reverse prediction,
// PCA, Mahalanobis MDS, residual anomaly ranking and the full pipeline.
//
// Exit codes: 0 success, 1 data error, 2 numerical-convergence error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netreg/dataio.hpp"
#include "netreg/format.hpp"
#include "netreg/pipeline.hpp"
#include "netreg/projection.hpp"
#include "netreg/tangent.hpp"

namespace fs = std::filesystem;
using namespace netreg;

namespace {

std::vector<double> parse_double_list(const std::string& csv,
                                      const std::string& flag) {
  std::vector<double> values;
  std::string item;
  std::istringstream is(csv);
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DataError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (values.empty()) {
    throw DataError(flag + ": empty list");
  }
  return values;
}

Eigen::VectorXd parse_point(const std::string& csv) {
  const std::vector<double> values = parse_double_list(csv, "--at");
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = values[i];
  }
  return x;
}

// Resolves --bandwidth "cv" (leave-one-out over the grid) or a number.
double resolve_bandwidth(const std::string& spec, const std::string& cv_grid,
                         const NetworkDataset& data, const PowerConfig& power,
                         double truncation, std::ostream& log) {
  if (spec != "cv") {
    try {
      std::size_t used = 0;
      const double h = std::stod(spec, &used);
      if (used != spec.size()) throw std::invalid_argument(spec);
      return h;
    } catch (const std::exception&) {
      throw DataError("--bandwidth: expected a positive number or 'cv', got '" +
                      spec + "'");
    }
  }
  std::vector<double> grid;
  if (!cv_grid.empty()) {
    grid = parse_double_list(cv_grid, "--cv-grid");
  } else {
    double mean = 0.0;
    for (const auto& x : data.covariates()) mean += x(0);
    mean /= static_cast<double>(data.n());
    double var = 0.0;
    for (const auto& x : data.covariates()) var += (x(0) - mean) * (x(0) - mean);
    var /= static_cast<double>(data.n() - 1);
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    grid = {0.5 * sd, sd, 2.0 * sd, 4.0 * sd, 8.0 * sd};
  }
  const BandwidthSelection sel =
      loocv_bandwidth(data, grid, power, truncation);
  log << "# cross-validation criterion\n";
  for (const auto& [h, crit] : sel.criterion) {
    log << "# h=" << format_double(h) << " criterion=" << format_double(crit)
        << "\n";
  }
  log << "# selected h=" << format_double(sel.best_h) << "\n";
  return sel.best_h;
}

std::ostream& open_output(std::ofstream& file, const std::string& out_path) {
  if (out_path.empty()) return std::cout;
  file.open(out_path);
  if (!file) {
    throw DataError("cannot open '" + out_path + "' for writing");
  }
  return file;
}

Eigen::MatrixXd read_dense_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    std::vector<double> row;
    double value = 0.0;
    while (is >> value) row.push_back(value);
    if (!is.eof()) {
      throw DataError("'" + path.string() + "': malformed matrix row '" + line +
                      "'");
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw DataError("'" + path.string() + "': empty matrix");
  }
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw DataError("'" + path.string() + "': ragged matrix rows");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return mat;
}

void print_series(std::ostream& out, const DistanceSeries& series,
                  const std::string& value_name) {
  out << "label\t" << value_name << "\n";
  for (Eigen::Index i = 0; i < series.values.size(); ++i) {
    out << series.labels[static_cast<std::size_t>(i)] << "\t"
        << format_double(series.values(i)) << "\n";
  }
}

struct CommonOptions {
  std::string manifest;
  double alpha = 1.0;
  double truncation = 10.0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--manifest", opts.manifest, "Dataset manifest file")
      ->required();
  cmd->add_option("--alpha", opts.alpha, "Embedding power (> 0)")
      ->default_val(1.0);
  cmd->add_option("--truncation-multiple", opts.truncation,
                  "Kernel support radius in bandwidths")
      ->default_val(10.0);
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "netreg: non-parametric regression and anomaly analysis for "
      "graph-Laplacian network series"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Check network files, a manifest or a dense matrix");
  std::vector<std::string> validate_paths;
  std::string validate_manifest, validate_matrix;
  double validate_tol = 1e-9;
  validate->add_option("paths", validate_paths, "Edge-list network files");
  validate->add_option("--manifest", validate_manifest,
                       "Validate every network in a manifest");
  validate->add_option("--matrix", validate_matrix,
                       "Dense matrix file to test against the Laplacian "
                       "constraints");
  validate->add_option("--tol", validate_tol, "Relative validation tolerance")
      ->default_val(1e-9);

  // distances
  auto* distances = app.add_subcommand(
      "distances", "Distances between consecutive observations");
  CommonOptions distances_opts;
  add_common(distances, distances_opts);
  std::string distances_out;
  distances->add_option("--out", distances_out, "Output file (default stdout)");

  // cv
  auto* cv = app.add_subcommand(
      "cv", "Leave-one-out cross-validation of the bandwidth");
  CommonOptions cv_opts;
  add_common(cv, cv_opts);
  std::string cv_grid_spec;
  cv->add_option("--cv-grid", cv_grid_spec,
                 "Candidate bandwidths, comma separated (default "
                 "{0.5,1,2,4,8} x sd(x))");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the regression curve over a grid");
  CommonOptions fit_opts;
  add_common(fit, fit_opts);
  std::string fit_bandwidth = "cv", fit_cv_grid, fit_grid = "auto", fit_out;
  fit->add_option("--bandwidth", fit_bandwidth, "Bandwidth or 'cv'")
      ->default_val("cv");
  fit->add_option("--cv-grid", fit_cv_grid, "Candidate bandwidths for 'cv'");
  fit->add_option("--query-grid", fit_grid,
                  "'auto' (20 points) or comma-separated covariate values")
      ->default_val("auto");
  fit->add_option("--out", fit_out, "Output directory")->required();

  // predict
  auto* predict = app.add_subcommand(
      "predict", "Estimate the network Laplacian at covariate values");
  CommonOptions predict_opts;
  add_common(predict, predict_opts);
  std::vector<std::string> predict_at;
  std::string predict_out;
  double predict_bandwidth = 0.0;
  predict->add_option("--bandwidth", predict_bandwidth, "Bandwidth (> 0)")
      ->required();
  predict
      ->add_option("--at", predict_at,
                   "Covariate value (comma separated for p > 1); repeatable")
      ->required();
  predict->add_option("--out", predict_out, "Output file (default stdout)");

  // reverse-predict
  auto* reverse = app.add_subcommand(
      "reverse-predict", "Predict the covariate of a network from distances");
  CommonOptions reverse_opts;
  add_common(reverse, reverse_opts);
  std::string reverse_network;
  double reverse_bandwidth = 0.0;
  reverse->add_option("--network", reverse_network, "Query network file")
      ->required();
  reverse
      ->add_option("--bandwidth", reverse_bandwidth,
                   "Bandwidth on the distance scale (> 0)")
      ->required();

  // pca
  auto* pca = app.add_subcommand(
      "pca", "Principal component scores of the tangent coordinates");
  CommonOptions pca_opts;
  add_common(pca, pca_opts);
  int pca_components = 2;
  std::string pca_out;
  pca->add_option("--components", pca_components, "Number of components")
      ->default_val(2);
  pca->add_option("--out", pca_out, "Output file (default stdout)");

  // mds
  auto* mds = app.add_subcommand(
      "mds", "Classical MDS on the Mahalanobis AR(1) distances");
  CommonOptions mds_opts;
  add_common(mds, mds_opts);
  std::string mds_method = "ls", mds_rho_grid, mds_out, mds_eigen_out;
  double mds_rho = 0.0;
  int mds_dims = 2;
  mds->add_option("--rho-method", mds_method, "ls | pc1grid | fixed")
      ->default_val("ls")
      ->check(CLI::IsMember({"ls", "pc1grid", "fixed"}));
  mds->add_option("--rho", mds_rho, "rho for --rho-method fixed");
  mds->add_option("--rho-grid", mds_rho_grid,
                  "Candidates for pc1grid (default 0.05..0.95)");
  mds->add_option("--dims", mds_dims, "Number of MDS axes")->default_val(2);
  mds->add_option("--out", mds_out, "Coordinates file (default stdout)");
  mds->add_option("--eigenvalues", mds_eigen_out, "Eigenvalue report file");

  // residuals
  auto* residuals = app.add_subcommand(
      "residuals", "Residual distances to the fitted curve, ranked");
  CommonOptions residuals_opts;
  add_common(residuals, residuals_opts);
  std::string residuals_bandwidth = "cv", residuals_cv_grid, residuals_out;
  std::size_t residuals_top = 0;
  residuals->add_option("--bandwidth", residuals_bandwidth, "Bandwidth or 'cv'")
      ->default_val("cv");
  residuals->add_option("--cv-grid", residuals_cv_grid,
                        "Candidate bandwidths for 'cv'");
  residuals->add_option("--top", residuals_top,
                        "Rank only the top k anomalies (default: all)");
  residuals->add_option("--out", residuals_out, "Output file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Full pipeline into an output directory");
  CommonOptions run_opts;
  add_common(run, run_opts);
  std::string run_bandwidth = "cv", run_cv_grid, run_grid = "auto";
  std::string run_method = "ls", run_rho_grid, run_out;
  double run_rho = 0.0;
  bool run_standardize = false;
  double run_projection_tol = 1e-8;
  long run_projection_max_iter = 0;
  int run_mds_dims = 2, run_pca_components = 2;
  run->add_option("--bandwidth", run_bandwidth, "Bandwidth or 'cv'")
      ->default_val("cv");
  run->add_option("--cv-grid", run_cv_grid, "Candidate bandwidths for 'cv'");
  run->add_option("--query-grid", run_grid,
                  "'auto' (20 points) or comma-separated covariate values")
      ->default_val("auto");
  run->add_option("--rho-method", run_method, "ls | pc1grid | fixed")
      ->default_val("ls")
      ->check(CLI::IsMember({"ls", "pc1grid", "fixed"}));
  run->add_option("--rho", run_rho, "rho for --rho-method fixed");
  run->add_option("--rho-grid", run_rho_grid,
                  "Candidates for pc1grid (default 0.05..0.95)");
  run->add_flag("--standardize", run_standardize,
                "Standardize covariates before fitting");
  run->add_option("--projection-tol", run_projection_tol,
                  "KKT tolerance of the cone projection")
      ->default_val(1e-8);
  run->add_option("--projection-max-iter", run_projection_max_iter,
                  "Projection iteration budget (0: 50*m^2)");
  run->add_option("--mds-dims", run_mds_dims, "MDS axes")->default_val(2);
  run->add_option("--pca-components", run_pca_components, "PCA components")
      ->default_val(2);
  run->add_option("--out", run_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (validate->parsed()) {
    bool all_ok = true;
    auto report = [&](const std::string& what, const LaplacianDiagnostics& diag) {
      if (diag.ok) {
        std::cout << "OK " << what << "\n";
      } else {
        all_ok = false;
        std::cout << "FAIL " << what << "\n";
        for (const auto& failure : diag.failures) {
          std::cout << "  " << failure << "\n";
        }
      }
    };
    for (const auto& path : validate_paths) {
      const WeightedNetwork net = load_network(path);
      const GraphLaplacian lap = laplacian_from_network(net);
      report(path + " (m=" + std::to_string(net.size()) + ")",
             validate_laplacian(lap.matrix(), validate_tol));
    }
    if (!validate_manifest.empty()) {
      const NetworkDataset data = load_dataset(fs::path(validate_manifest));
      for (Eigen::Index i = 0; i < data.n(); ++i) {
        report("observation '" + data.labels()[static_cast<std::size_t>(i)] + "'",
               validate_laplacian(
                   data.responses()[static_cast<std::size_t>(i)].matrix(),
                   validate_tol));
      }
      std::cout << "dataset: n=" << data.n() << " m=" << data.m()
                << " p=" << data.p() << "\n";
    }
    if (!validate_matrix.empty()) {
      report(validate_matrix,
             validate_laplacian(read_dense_matrix(validate_matrix), validate_tol));
    }
    if (validate_paths.empty() && validate_manifest.empty() &&
        validate_matrix.empty()) {
      throw DataError("validate: nothing to do (give files, --manifest or "
                      "--matrix)");
    }
    return all_ok ? 0 : 1;
  }

  if (distances->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(distances_opts.manifest));
    const DistanceSeries series =
        consecutive_distances(data, PowerConfig(distances_opts.alpha));
    std::ofstream file;
    print_series(open_output(file, distances_out), series, "distance");
    return 0;
  }

  if (cv->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(cv_opts.manifest));
    const PowerConfig power(cv_opts.alpha);
    std::vector<double> grid;
    if (!cv_grid_spec.empty()) {
      grid = parse_double_list(cv_grid_spec, "--cv-grid");
    } else {
      double mean = 0.0;
      for (const auto& x : data.covariates()) mean += x(0);
      mean /= static_cast<double>(data.n());
      double var = 0.0;
      for (const auto& x : data.covariates()) {
        var += (x(0) - mean) * (x(0) - mean);
      }
      var /= static_cast<double>(data.n() - 1);
      const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
      grid = {0.5 * sd, sd, 2.0 * sd, 4.0 * sd, 8.0 * sd};
    }
    const BandwidthSelection sel =
        loocv_bandwidth(data, grid, power, cv_opts.truncation);
    std::cout << "h\tcriterion\n";
    for (const auto& [h, crit] : sel.criterion) {
      std::cout << format_double(h) << "\t" << format_double(crit) << "\n";
    }
    std::cout << "# selected h=" << format_double(sel.best_h) << "\n";
    return 0;
  }

  if (fit->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(fit_opts.manifest));
    const PowerConfig power(fit_opts.alpha);
    const double h = resolve_bandwidth(fit_bandwidth, fit_cv_grid, data, power,
                                       fit_opts.truncation, std::cout);
    std::vector<Eigen::VectorXd> grid;
    if (fit_grid == "auto") {
      if (data.p() != 1) {
        throw DataError("--query-grid auto needs a scalar covariate");
      }
      double lo = data.covariates().front()(0), hi = lo;
      for (const auto& x : data.covariates()) {
        lo = std::min(lo, x(0));
        hi = std::max(hi, x(0));
      }
      for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd x(1);
        x(0) = lo + (hi - lo) * i / 19.0;
        grid.push_back(x);
      }
    } else {
      for (double value : parse_double_list(fit_grid, "--query-grid")) {
        Eigen::VectorXd x(1);
        x(0) = value;
        grid.push_back(x);
      }
    }
    const CurveFit curve =
        fit_curve(grid, data, KernelConfig(h, fit_opts.truncation), power);
    const fs::path out_dir(fit_out);
    fs::create_directories(out_dir / "curve");
    {
      std::ofstream out(out_dir / "query_points.tsv");
      out << "index\tx\n";
      for (std::size_t g = 0; g < grid.size(); ++g) {
        out << (g + 1) << "\t" << format_double(grid[g](0)) << "\n";
      }
    }
    for (std::size_t g = 0; g < curve.fitted.size(); ++g) {
      std::ostringstream name;
      name << "fitted_" << std::setw(3) << std::setfill('0') << (g + 1)
           << ".txt";
      write_matrix(out_dir / "curve" / name.str(), curve.fitted[g].matrix());
    }
    std::cout << "fitted " << curve.fitted.size() << " grid points with h="
              << format_double(h) << " alpha=" << format_double(fit_opts.alpha)
              << " into " << out_dir.string() << "\n";
    return 0;
  }

  if (predict->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(predict_opts.manifest));
    const PowerConfig power(predict_opts.alpha);
    const KernelConfig kernel(predict_bandwidth, predict_opts.truncation);
    std::ofstream file;
    std::ostream& out = open_output(file, predict_out);
    for (const std::string& spec : predict_at) {
      const Eigen::VectorXd x = parse_point(spec);
      const GraphLaplacian est = nw_estimate_power(x, data, kernel, power);
      out << "# x = " << spec << "\n";
      for (Eigen::Index i = 0; i < est.size(); ++i) {
        for (Eigen::Index j = 0; j < est.size(); ++j) {
          if (j > 0) out << " ";
          out << format_double(est.matrix()(i, j));
        }
        out << "\n";
      }
    }
    return 0;
  }

  if (reverse->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(reverse_opts.manifest));
    const PowerConfig power(reverse_opts.alpha);
    const GraphLaplacian query =
        laplacian_from_network(load_network(reverse_network));
    const Eigen::VectorXd t =
        reverse_nw(query, data,
                   KernelConfig(reverse_bandwidth, reverse_opts.truncation),
                   power);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (i > 0) std::cout << ",";
      std::cout << format_double(t(i));
    }
    std::cout << "\n";
    return 0;
  }

  if (pca->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(pca_opts.manifest));
    const PowerConfig power(pca_opts.alpha);
    std::vector<Eigen::VectorXd> tangents;
    for (const GraphLaplacian& lap : data.responses()) {
      tangents.push_back(to_tangent(lap, power).coords);
    }
    const PcaModel model = pca_fit(tangents);
    const Eigen::Index k =
        std::min<Eigen::Index>(pca_components, model.components.cols());
    const Eigen::MatrixXd scores = pca_project(model, tangents, k);
    std::ofstream file;
    std::ostream& out = open_output(file, pca_out);
    out << "label";
    for (Eigen::Index j = 0; j < k; ++j) out << "\tpc" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      out << data.labels()[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < k; ++j) {
        out << "\t" << format_double(scores(i, j));
      }
      out << "\n";
    }
    const double total = model.explained_variance.sum();
    for (Eigen::Index j = 0; j < k; ++j) {
      std::cout << "# pc" << (j + 1) << " variance fraction "
                << format_double(total > 0 ? model.explained_variance(j) / total
                                           : 0.0)
                << "\n";
    }
    return 0;
  }

  if (mds->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(mds_opts.manifest));
    const PowerConfig power(mds_opts.alpha);
    std::vector<Eigen::VectorXd> tangents;
    double rho = 0.0;
    if (mds_method == "ls") {
      for (const GraphLaplacian& lap : data.responses()) {
        tangents.push_back(to_tangent(lap, power).coords);
      }
      rho = estimate_rho_ls(tangents);
    } else if (mds_method == "pc1grid") {
      std::vector<double> grid;
      if (!mds_rho_grid.empty()) {
        grid = parse_double_list(mds_rho_grid, "--rho-grid");
      } else {
        for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
      }
      rho = estimate_rho_pc1(data, grid, power);
    } else {
      if (!(mds_rho > 0.0 && mds_rho < 1.0)) {
        throw DataError("--rho-method fixed needs --rho in (0,1)");
      }
      rho = mds_rho;
    }
    const Eigen::MatrixXd dist = mahalanobis_distance_matrix(data, rho, power);
    const MdsResult result = classical_mds(dist, mds_dims);
    std::ofstream file;
    std::ostream& out = open_output(file, mds_out);
    out << "label";
    for (Eigen::Index j = 0; j < result.coordinates.cols(); ++j) {
      out << "\taxis" << (j + 1);
    }
    out << "\n";
    for (Eigen::Index i = 0; i < result.coordinates.rows(); ++i) {
      out << data.labels()[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < result.coordinates.cols(); ++j) {
        out << "\t" << format_double(result.coordinates(i, j));
      }
      out << "\n";
    }
    std::cout << "# rho (" << mds_method << ") = " << format_double(rho) << "\n";
    if (result.truncated) {
      std::cout << "# warning: fewer than " << mds_dims
                << " positive eigenvalues; returned "
                << result.coordinates.cols() << " axes\n";
    }
    if (!mds_eigen_out.empty()) {
      std::ofstream eigen_file(mds_eigen_out);
      if (!eigen_file) {
        throw DataError("cannot open '" + mds_eigen_out + "' for writing");
      }
      eigen_file << "index\teigenvalue\n";
      for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
        eigen_file << (i + 1) << "\t" << format_double(result.eigenvalues(i))
                   << "\n";
      }
    }
    return 0;
  }

  if (residuals->parsed()) {
    const NetworkDataset data = load_dataset(fs::path(residuals_opts.manifest));
    const PowerConfig power(residuals_opts.alpha);
    const double h =
        resolve_bandwidth(residuals_bandwidth, residuals_cv_grid, data, power,
                          residuals_opts.truncation, std::cout);
    const CurveFit fit_at_obs =
        fit_curve(data.covariates(), data,
                  KernelConfig(h, residuals_opts.truncation), power);
    const DistanceSeries series = residual_distances(data, fit_at_obs, power);
    const std::size_t k = residuals_top == 0
                              ? static_cast<std::size_t>(series.values.size())
                              : residuals_top;
    const AnomalyRanking ranking = rank_anomalies(series, k);
    std::ofstream file;
    std::ostream& out = open_output(file, residuals_out);
    out << "rank\tlabel\tresidual\tflagged\n";
    for (std::size_t r = 0; r < ranking.ranked.size(); ++r) {
      const auto& entry = ranking.ranked[r];
      out << (r + 1) << "\t" << entry.label << "\t"
          << format_double(entry.value) << "\t"
          << (entry.value > ranking.threshold ? 1 : 0) << "\n";
    }
    std::cout << "# threshold (median + 3*MAD) = "
              << format_double(ranking.threshold) << "\n";
    return 0;
  }

  if (run->parsed()) {
    RunConfig config;
    config.alpha = run_opts.alpha;
    config.truncation_multiple = run_opts.truncation;
    if (run_bandwidth != "cv") {
      try {
        std::size_t used = 0;
        config.bandwidth = std::stod(run_bandwidth, &used);
        if (used != run_bandwidth.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw DataError("--bandwidth: expected a positive number or 'cv'");
      }
    }
    if (!run_cv_grid.empty()) {
      config.cv_grid = parse_double_list(run_cv_grid, "--cv-grid");
    }
    if (run_grid != "auto") {
      config.query_grid = parse_double_list(run_grid, "--query-grid");
    }
    config.rho_method = run_method == "ls"
                            ? RhoMethod::ls
                            : (run_method == "pc1grid" ? RhoMethod::pc1grid
                                                       : RhoMethod::fixed);
    if (run_method == "fixed") config.rho_fixed = run_rho;
    if (!run_rho_grid.empty()) {
      config.rho_grid = parse_double_list(run_rho_grid, "--rho-grid");
    }
    config.standardize = run_standardize;
    config.projection_tol = run_projection_tol;
    config.projection_max_iter = run_projection_max_iter;
    config.mds_dims = run_mds_dims;
    config.pca_components = run_pca_components;
    config.output_dir = run_out;

    const RunSummary summary = run_pipeline(config, fs::path(run_opts.manifest));
    std::cout << "n=" << summary.n << " m=" << summary.m << "\n";
    std::cout << "bandwidth=" << format_double(summary.bandwidth_used)
              << (summary.bandwidth_from_cv ? " (cross-validated)" : " (fixed)")
              << "\n";
    std::cout << "rho_ls=" << format_double(summary.rho_ls)
              << " rho_pc1=" << format_double(summary.rho_pc1);
    if (summary.rho_fixed) {
      std::cout << " rho_fixed=" << format_double(*summary.rho_fixed);
    }
    std::cout << "\n";
    const std::size_t top = std::min<std::size_t>(5, summary.anomalies.ranked.size());
    std::cout << "top residuals:";
    for (std::size_t r = 0; r < top; ++r) {
      std::cout << " " << summary.anomalies.ranked[r].label << "="
                << format_double(summary.anomalies.ranked[r].value);
    }
    std::cout << "\n";
    std::cout << "artifacts in " << summary.output_dir.string() << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConvergenceError& err) {
    std::cerr << "convergence error: " << err.what() << "\n";
    return 2;
  } catch (const DataError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
