#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"
#include "netreg/pipeline.hpp"
#include "test_support.hpp"

using namespace netreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netreg_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Twelve 4-node networks whose edge weights drift smoothly with the month
// index, with bounded perturbations.
fs::path make_dataset(const fs::path& dir, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  std::string manifest = "normalization: trace\n";
  for (int month = 1; month <= 12; ++month) {
    const double x = month / 12.0;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    auto set = [&](int i, int j, double value) {
      w(i, j) = value;
      w(j, i) = value;
    };
    set(0, 1, 1.0 + 0.5 * x + noise(rng));
    set(0, 2, 1.5 - 0.4 * x + noise(rng));
    set(1, 3, 0.8 + noise(rng));
    set(2, 3, 1.2 + 0.3 * x + noise(rng));
    const std::string name = "m" + std::to_string(month) + ".net";
    write_network(WeightedNetwork({"a", "b", "c", "d"}, w), dir / name);
    manifest += name + "," + std::to_string(month) + "," +
                std::to_string(month) + "\n";
  }
  const fs::path manifest_path = dir / "manifest.csv";
  std::ofstream out(manifest_path);
  out << manifest;
  return manifest_path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("run_pipeline writes the full artifact set") {
  const fs::path dir = scratch_dir("artifacts");
  const fs::path manifest = make_dataset(dir, 101);

  RunConfig config;
  config.alpha = 0.5;
  config.cv_grid = {1.0, 2.0, 4.0};
  config.rho_method = RhoMethod::fixed;
  config.rho_fixed = 0.4;
  config.output_dir = (dir / "out").string();

  const RunSummary summary = run_pipeline(config, manifest);
  CHECK(summary.bandwidth_from_cv);
  CHECK((summary.bandwidth_used == 1.0 || summary.bandwidth_used == 2.0 ||
         summary.bandwidth_used == 4.0));
  CHECK(summary.cv_table.size() == 3);
  CHECK(summary.rho_ls > 0.0);
  CHECK(summary.rho_ls < 1.0);
  CHECK(summary.rho_pc1 > 0.0);
  CHECK(summary.n == 12);
  CHECK(summary.m == 4);
  CHECK(summary.anomalies.ranked.size() == 12);

  const fs::path out = dir / "out";
  for (const char* name :
       {"query_points.tsv", "consecutive_distances.tsv",
        "residual_distances.tsv", "anomalies.tsv", "pca_observations.tsv",
        "pca_curve.tsv", "pca_explained_variance.tsv",
        "mds_ls_coordinates.tsv", "mds_ls_eigenvalues.tsv",
        "mds_pc1_coordinates.tsv", "mds_pc1_eigenvalues.tsv",
        "mds_fixed_coordinates.tsv", "mds_fixed_eigenvalues.tsv",
        "cv_table.tsv", "run_metadata.json"}) {
    CHECK_MESSAGE(fs::exists(out / name), name);
  }

  // Default query grid: 20 points spanning the covariate range.
  std::ifstream grid(out / "query_points.tsv");
  std::string line;
  int rows = -1;  // header
  while (std::getline(grid, line)) ++rows;
  CHECK(rows == 20);

  // Each fitted curve point is a valid Laplacian.
  for (int g = 1; g <= 20; ++g) {
    std::ostringstream name;
    name << "curve/fitted_" << std::setw(3) << std::setfill('0') << g << ".txt";
    REQUIRE(fs::exists(out / name.str()));
    std::ifstream fin(out / name.str());
    Eigen::MatrixXd mat(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) fin >> mat(i, j);
    }
    CHECK(validate_laplacian(mat, 1e-8).ok);
  }

  // Metadata parses and reports the inputs.
  const auto meta = nlohmann::json::parse(read_file(out / "run_metadata.json"));
  CHECK(meta["alpha"] == 0.5);
  CHECK(meta["bandwidth"]["mode"] == "cv");
  CHECK(meta["dataset"]["n"] == 12);
  CHECK(meta["dataset"]["m"] == 4);
  CHECK(meta["inputs"]["networks"].size() == 12);
  CHECK(meta["rho"]["fixed"] == 0.4);
  for (const auto& output : meta["outputs"]) {
    CHECK(fs::exists(out / output.get<std::string>()));
  }
}

TEST_CASE("identical runs produce byte-identical outputs") {
  const fs::path dir = scratch_dir("determinism");
  const fs::path manifest = make_dataset(dir, 202);

  RunConfig config;
  config.alpha = 0.5;
  config.bandwidth = 2.0;
  config.query_grid = {2.0, 5.0, 9.0};

  config.output_dir = (dir / "run1").string();
  run_pipeline(config, manifest);
  config.output_dir = (dir / "run2").string();
  run_pipeline(config, manifest);

  const auto meta =
      nlohmann::json::parse(read_file(dir / "run1" / "run_metadata.json"));
  int compared = 0;
  for (const auto& output : meta["outputs"]) {
    const std::string name = output.get<std::string>();
    CHECK_MESSAGE(read_file(dir / "run1" / name) == read_file(dir / "run2" / name),
                  name);
    ++compared;
  }
  CHECK(compared > 5);
  // The metadata differs only in the output_dir-independent fields; check it
  // byte for byte too (no timestamps or machine state are recorded).
  CHECK(read_file(dir / "run1" / "run_metadata.json") ==
        read_file(dir / "run2" / "run_metadata.json"));
}

TEST_CASE("a run is reproducible from its metadata alone") {
  const fs::path dir = scratch_dir("reproduce");
  const fs::path manifest = make_dataset(dir, 303);

  RunConfig config;
  config.alpha = 1.0;
  config.cv_grid = {0.5, 1.0, 2.0, 4.0, 8.0};
  config.standardize = true;
  config.output_dir = (dir / "orig").string();
  run_pipeline(config, manifest);

  // Rebuild the configuration from the recorded metadata.
  const auto meta =
      nlohmann::json::parse(read_file(dir / "orig" / "run_metadata.json"));
  RunConfig rebuilt;
  rebuilt.alpha = meta["alpha"].get<double>();
  if (meta["bandwidth"]["mode"] == "cv") {
    rebuilt.cv_grid = meta["bandwidth"]["cv_grid"].get<std::vector<double>>();
  } else {
    rebuilt.bandwidth = meta["bandwidth"]["value"].get<double>();
  }
  rebuilt.truncation_multiple = meta["truncation_multiple"].get<double>();
  rebuilt.query_grid = meta["query_grid"].get<std::vector<double>>();
  rebuilt.standardize = meta["standardize"]["enabled"].get<bool>();
  rebuilt.rho_grid = meta["rho"]["pc1_grid"].get<std::vector<double>>();
  rebuilt.projection_tol = meta["projection"]["tol"].get<double>();
  rebuilt.mds_dims = meta["mds_dims"].get<int>();
  rebuilt.output_dir = (dir / "redo").string();
  run_pipeline(rebuilt, manifest);

  for (const auto& output : meta["outputs"]) {
    const std::string name = output.get<std::string>();
    CHECK_MESSAGE(read_file(dir / "orig" / name) == read_file(dir / "redo" / name),
                  name);
  }
}

TEST_CASE("run_pipeline validation") {
  const fs::path dir = scratch_dir("validation");
  const fs::path manifest = make_dataset(dir, 404);

  RunConfig config;
  config.output_dir = (dir / "out").string();

  SUBCASE("fixed rho method requires a value") {
    config.rho_method = RhoMethod::fixed;
    CHECK_THROWS_AS(run_pipeline(config, manifest), DataError);
    config.rho_fixed = 1.5;
    CHECK_THROWS_AS(run_pipeline(config, manifest), DataError);
  }

  SUBCASE("bandwidth must be positive") {
    config.bandwidth = -1.0;
    CHECK_THROWS_AS(run_pipeline(config, manifest), DataError);
  }

  SUBCASE("output dir is required") {
    config.output_dir.clear();
    CHECK_THROWS_AS(run_pipeline(config, manifest), DataError);
  }

  SUBCASE("multivariate covariates are rejected") {
    std::ofstream out(dir / "multi.csv");
    out << "m1.net,a,1,1\nm2.net,b,2,2\n";
    out.close();
    CHECK_THROWS_WITH_AS(run_pipeline(config, dir / "multi.csv"),
                         doctest::Contains("scalar"), DataError);
  }
}

TEST_SUITE_END();
