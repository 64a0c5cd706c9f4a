#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netreg/dataio.hpp"
#include "netreg/regression.hpp"
#include "netreg/trend.hpp"

namespace netreg {

enum class RhoMethod { ls, pc1grid, fixed };

/// Full-run configuration. An unset bandwidth requests leave-one-out
/// cross-validation; an empty cv_grid requests the default candidates
/// {0.5, 1, 2, 4, 8} scaled by the covariate standard deviation; an empty
/// query_grid requests 20 evenly spaced points across the covariate range.
struct RunConfig {
  double alpha = 1.0;
  std::optional<double> bandwidth;
  std::vector<double> cv_grid;
  double truncation_multiple = 10.0;
  std::vector<double> query_grid;
  RhoMethod rho_method = RhoMethod::ls;
  std::optional<double> rho_fixed;
  std::string output_dir;
  bool standardize = false;
  double projection_tol = 1e-8;
  long projection_max_iter = 0;  // 0: default 50*m*m
  std::vector<double> rho_grid;  // pc1 candidates; empty: {0.05,...,0.95}
  int mds_dims = 2;
  int pca_components = 2;
};

struct RunSummary {
  double bandwidth_used = 0.0;
  bool bandwidth_from_cv = false;
  std::vector<std::pair<double, double>> cv_table;
  double rho_ls = 0.0;
  double rho_pc1 = 0.0;
  std::optional<double> rho_fixed;
  AnomalyRanking anomalies;  // full ranked residual series
  std::filesystem::path output_dir;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
};

/// Runs the whole analysis on a manifest-described dataset and writes
/// plot-ready artifacts plus a metadata record sufficient to reproduce the
/// run. Identical inputs and config produce byte-identical files. Requires a
/// scalar covariate and n >= 2.
RunSummary run_pipeline(const RunConfig& config,
                        const std::filesystem::path& manifest_path);

}  // namespace netreg
