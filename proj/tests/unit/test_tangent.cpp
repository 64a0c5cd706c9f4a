#include "doctest.h"

#include <random>

#include "netreg/tangent.hpp"
#include "test_support.hpp"

using namespace netreg;

namespace {

GraphLaplacian pair_laplacian() {
  Eigen::MatrixXd l(2, 2);
  l << 1, -1, -1, 1;
  return GraphLaplacian::unchecked(l);
}

}  // namespace

TEST_SUITE_BEGIN("tangent");

TEST_CASE("helmert submatrix for m = 2") {
  const HelmertBasis basis = helmert_submatrix(2);
  REQUIRE(basis.matrix().rows() == 1);
  REQUIRE(basis.matrix().cols() == 2);
  CHECK(basis.matrix()(0, 0) ==
        doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(basis.matrix()(0, 1) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("helmert invariants for a range of m") {
  for (Eigen::Index m = 2; m <= 12; ++m) {
    const Eigen::MatrixXd h = helmert_submatrix(m).matrix();
    CHECK((h * h.transpose() - Eigen::MatrixXd::Identity(m - 1, m - 1))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    CHECK((h * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd centering =
        Eigen::MatrixXd::Identity(m, m) -
        Eigen::MatrixXd::Constant(m, m, 1.0 / static_cast<double>(m));
    CHECK((h.transpose() * h - centering).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("helmert rejects m < 2") {
  CHECK_THROWS_AS(helmert_submatrix(1), DataError);
  CHECK_THROWS_AS(helmert_submatrix(0), DataError);
}

TEST_CASE("to_tangent on the unit-edge pair") {
  const TangentVector v = to_tangent(pair_laplacian(), PowerConfig(1.0));
  REQUIRE(v.coords.size() == 1);
  // H L Hᵀ is the 1x1 matrix [2]; the tangent norm equals ||L||_F = 2.
  CHECK(v.coords(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(v.coords.norm() ==
        doctest::Approx(pair_laplacian().matrix().norm()).epsilon(1e-12));
}

TEST_CASE("zero Laplacian maps to the zero vector") {
  const GraphLaplacian zero =
      GraphLaplacian::unchecked(Eigen::MatrixXd::Zero(5, 5));
  const TangentVector v = to_tangent(zero, PowerConfig(0.5));
  CHECK(v.coords.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(v.m == 5);
  CHECK(v.coords.size() == 10);
}

TEST_CASE("isometry: tangent distances equal power distances") {
  std::mt19937_64 rng(31);
  for (double alpha : {0.5, 1.0}) {
    const PowerConfig cfg(alpha);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index m = 2 + trial % 8;
      const GraphLaplacian a = testing::random_laplacian(m, rng);
      const GraphLaplacian b = testing::random_laplacian(m, rng);
      const double tangent_dist =
          (to_tangent(a, cfg).coords - to_tangent(b, cfg).coords).norm();
      CHECK(std::abs(tangent_dist - power_distance(a, b, cfg)) <= 1e-9);
    }
  }
}

TEST_CASE("from_tangent") {
  SUBCASE("round trip at alpha = 1") {
    std::mt19937_64 rng(32);
    const GraphLaplacian lap = testing::random_laplacian(6, rng);
    const SymmetricMatrix back = from_tangent(to_tangent(lap, PowerConfig(1.0)));
    CHECK((back.matrix() - lap.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  }

  SUBCASE("round trip equals the embedded matrix for any alpha") {
    // Trace-normalized inputs: the tolerance is absolute at unit scale.
    std::mt19937_64 rng(33);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const PowerConfig cfg(alpha);
      const GraphLaplacian lap =
          trace_normalize(testing::random_laplacian(5, rng));
      const SymmetricMatrix embedded = power_map(lap, cfg);
      const SymmetricMatrix back = from_tangent(to_tangent(lap, cfg));
      CHECK((back.matrix() - embedded.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  SUBCASE("zero vector maps to the zero matrix") {
    const TangentVector zero(Eigen::VectorXd::Zero(6), 4, 1.0);
    CHECK(from_tangent(zero).matrix().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single coordinate [2] reproduces the unit-edge pair") {
    Eigen::VectorXd coords(1);
    coords << 2.0;
    const SymmetricMatrix back = from_tangent(TangentVector(coords, 2, 1.0));
    CHECK((back.matrix() - pair_laplacian().matrix()).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("tangent vector length must be triangular") {
  CHECK_THROWS_AS(TangentVector(Eigen::VectorXd::Zero(2), 1.0), DataError);
  CHECK_THROWS_AS(TangentVector(Eigen::VectorXd::Zero(4), 1.0), DataError);
  CHECK_NOTHROW(TangentVector(Eigen::VectorXd::Zero(6), 1.0));
  CHECK_THROWS_AS(TangentVector(Eigen::VectorXd::Zero(5), 4, 1.0), DataError);
}

TEST_CASE("to_tangent is linear at alpha = 1") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> coef(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const GraphLaplacian l1 = testing::random_laplacian(5, rng);
    const GraphLaplacian l2 = testing::random_laplacian(5, rng);
    const double a = coef(rng);
    const double b = coef(rng);
    const GraphLaplacian combo =
        GraphLaplacian::unchecked(a * l1.matrix() + b * l2.matrix());
    const PowerConfig cfg(1.0);
    const Eigen::VectorXd lhs = to_tangent(combo, cfg).coords;
    const Eigen::VectorXd rhs =
        a * to_tangent(l1, cfg).coords + b * to_tangent(l2, cfg).coords;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_SUITE_END();
