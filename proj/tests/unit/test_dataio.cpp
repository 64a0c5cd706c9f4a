#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "netreg/dataio.hpp"
#include "netreg/format.hpp"
#include "test_support.hpp"

using namespace netreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("netreg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_SUITE_BEGIN("dataio");

TEST_CASE("load_network") {
  const fs::path dir = scratch_dir("load_network");

  SUBCASE("header plus one edge, isolated node representable") {
    write_file(dir / "ok.net",
               "# a tiny network\n"
               "nodes: a,b,c\n"
               "a b 1.0\n");
    const WeightedNetwork net = load_network(dir / "ok.net");
    CHECK(net.size() == 3);
    CHECK(net.node_labels() == std::vector<std::string>{"a", "b", "c"});
    CHECK(net.weights()(0, 1) == 1.0);
    CHECK(net.weights()(1, 0) == 1.0);
    CHECK(net.weights().row(2).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("self-loop is rejected with its line number") {
    write_file(dir / "loop.net", "nodes: a,b\na a 1.0\n");
    CHECK_THROWS_WITH_AS(load_network(dir / "loop.net"),
                         doctest::Contains("line 2"), DataError);
  }

  SUBCASE("duplicate edge in reverse orientation is rejected") {
    write_file(dir / "dup.net", "nodes: a,b\na b 1\nb a 2\n");
    CHECK_THROWS_WITH_AS(load_network(dir / "dup.net"),
                         doctest::Contains("duplicate edge"), DataError);
  }

  SUBCASE("unknown label is rejected") {
    write_file(dir / "unknown.net", "nodes: a,b\na z 1\n");
    CHECK_THROWS_WITH_AS(load_network(dir / "unknown.net"),
                         doctest::Contains("unknown node label 'z'"), DataError);
  }

  SUBCASE("negative weight is rejected") {
    write_file(dir / "neg.net", "nodes: a,b\na b -0.5\n");
    CHECK_THROWS_WITH_AS(load_network(dir / "neg.net"),
                         doctest::Contains("negative weight"), DataError);
  }

  SUBCASE("malformed lines are rejected") {
    write_file(dir / "short.net", "nodes: a,b\na b\n");
    CHECK_THROWS_AS(load_network(dir / "short.net"), DataError);
    write_file(dir / "extra.net", "nodes: a,b\na b 1 2\n");
    CHECK_THROWS_AS(load_network(dir / "extra.net"), DataError);
    write_file(dir / "badnum.net", "nodes: a,b\na b 1.5x\n");
    CHECK_THROWS_AS(load_network(dir / "badnum.net"), DataError);
    write_file(dir / "noheader.net", "a b 1\n");
    CHECK_THROWS_AS(load_network(dir / "noheader.net"), DataError);
    write_file(dir / "dupnodes.net", "nodes: a,a\n");
    CHECK_THROWS_AS(load_network(dir / "dupnodes.net"), DataError);
    CHECK_THROWS_AS(load_network(dir / "missing.net"), DataError);
  }
}

TEST_CASE("write_network round trip is exact") {
  const fs::path dir = scratch_dir("round_trip");
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const WeightedNetwork net = testing::random_network(6, rng, 0.5);
    const fs::path path = dir / ("net" + std::to_string(trial) + ".net");
    write_network(net, path);
    const WeightedNetwork back = load_network(path);
    CHECK(back.node_labels() == net.node_labels());
    CHECK((back.weights().array() == net.weights().array()).all());
  }
}

TEST_CASE("format_double round trips doubles") {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> draw(-1e6, 1e6);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = draw(rng) * std::pow(10.0, trial % 13 - 6);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("load_manifest") {
  const fs::path dir = scratch_dir("manifest");

  SUBCASE("entries with directives and comments") {
    write_file(dir / "m.tsv",
               "# monthly networks\n"
               "normalization: trace\n"
               "a.net,jan,1\n"
               "b.net,feb,2\n");
    const DatasetManifest manifest = load_manifest(dir / "m.tsv");
    CHECK(manifest.normalization == Normalization::trace);
    REQUIRE(manifest.entries.size() == 2);
    CHECK(manifest.entries[0].network_path == "a.net");
    CHECK(manifest.entries[0].label == "jan");
    CHECK(manifest.entries[0].covariate(0) == 1.0);
    CHECK(manifest.base_dir == dir);
  }

  SUBCASE("multi-dimensional covariates") {
    write_file(dir / "m2.tsv", "a.net,p1,1,2.5\nb.net,p2,2,3.5\n");
    const DatasetManifest manifest = load_manifest(dir / "m2.tsv");
    CHECK(manifest.entries[0].covariate.size() == 2);
    CHECK(manifest.entries[1].covariate(1) == 3.5);
  }

  SUBCASE("errors") {
    write_file(dir / "dup.tsv", "a.net,x,1\nb.net,x,2\n");
    CHECK_THROWS_WITH_AS(load_manifest(dir / "dup.tsv"),
                         doctest::Contains("duplicate label"), DataError);

    write_file(dir / "dims.tsv", "a.net,x,1\nb.net,y,2,3\n");
    CHECK_THROWS_AS(load_manifest(dir / "dims.tsv"), DataError);

    write_file(dir / "short.tsv", "a.net,x\n");
    CHECK_THROWS_AS(load_manifest(dir / "short.tsv"), DataError);

    write_file(dir / "norm.tsv", "normalization: maybe\na.net,x,1\n");
    CHECK_THROWS_AS(load_manifest(dir / "norm.tsv"), DataError);

    write_file(dir / "empty.tsv", "# nothing\n");
    CHECK_THROWS_AS(load_manifest(dir / "empty.tsv"), DataError);
  }
}

TEST_CASE("load_dataset") {
  const fs::path dir = scratch_dir("dataset");
  write_file(dir / "a.net", "nodes: a,b,c\na b 2.0\nb c 1.0\n");
  write_file(dir / "b.net", "nodes: a,b,c\na b 1.0\na c 3.0\n");
  write_file(dir / "c.net", "nodes: a,b,c\nb c 4.0\n");

  SUBCASE("orders by covariate and applies trace normalization") {
    write_file(dir / "manifest.csv",
               "normalization: trace\n"
               "a.net,first,3\n"
               "b.net,second,1\n"
               "c.net,third,2\n");
    const NetworkDataset data = load_dataset(dir / "manifest.csv");
    REQUIRE(data.n() == 3);
    CHECK(data.labels() == std::vector<std::string>{"second", "third", "first"});
    CHECK(data.covariates()[0](0) == 1.0);
    CHECK(data.covariates()[2](0) == 3.0);
    for (const GraphLaplacian& lap : data.responses()) {
      CHECK(std::abs(lap.matrix().trace() - 1.0) <= 1e-12);
    }
  }

  SUBCASE("single entry dataset") {
    write_file(dir / "single.csv", "a.net,only,1\n");
    const NetworkDataset data = load_dataset(dir / "single.csv");
    CHECK(data.n() == 1);
    CHECK(data.m() == 3);
  }

  SUBCASE("node-set mismatch is an error") {
    write_file(dir / "other.net", "nodes: a,b,z\na b 1.0\n");
    write_file(dir / "mismatch.csv", "a.net,x,1\nother.net,y,2\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir / "mismatch.csv"),
                         doctest::Contains("node labels"), DataError);
  }

  SUBCASE("unreadable entry is an error") {
    write_file(dir / "missing.csv", "a.net,x,1\nnot_there.net,y,2\n");
    CHECK_THROWS_AS(load_dataset(dir / "missing.csv"), DataError);
  }

  SUBCASE("36 monthly files load as n = 36") {
    std::mt19937_64 rng(73);
    std::string manifest = "normalization: trace\n";
    for (int month = 1; month <= 36; ++month) {
      const std::string name = "month" + std::to_string(month) + ".net";
      write_network(testing::random_network(4, rng, 0.8), dir / name);
      manifest += name + "," + std::to_string(month) + "," +
                  std::to_string(month) + "\n";
    }
    write_file(dir / "months.csv", manifest);
    const NetworkDataset data = load_dataset(dir / "months.csv");
    CHECK(data.n() == 36);
    CHECK(data.labels().front() == "1");
    CHECK(data.labels().back() == "36");
  }
}

TEST_CASE("file_digest is content-determined") {
  const fs::path dir = scratch_dir("digest");
  write_file(dir / "one.txt", "hello\n");
  write_file(dir / "two.txt", "hello\n");
  write_file(dir / "three.txt", "world\n");
  CHECK(file_digest(dir / "one.txt") == file_digest(dir / "two.txt"));
  CHECK(file_digest(dir / "one.txt") != file_digest(dir / "three.txt"));
  CHECK(file_digest(dir / "one.txt").size() == 16);
}

TEST_CASE("series and matrix writers") {
  const fs::path dir = scratch_dir("writers");

  DistanceSeries series;
  series.labels = {"a", "b"};
  series.values.resize(2);
  series.values << 0.5, 1.25;
  write_series(dir / "series.tsv", "distance", series);
  std::ifstream in(dir / "series.tsv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "label\tdistance");
  std::getline(in, line);
  CHECK(line == "a\t0.5");

  Eigen::MatrixXd mat(2, 2);
  mat << 1.0, -0.25, -0.25, 1.0;
  write_matrix(dir / "mat.txt", mat);
  std::ifstream min(dir / "mat.txt");
  std::getline(min, line);
  CHECK(line == "1 -0.25");
}

TEST_SUITE_END();
