#include "doctest.h"

#include <random>

#include "common/projection_oracle.hpp"
#include "netreg/projection.hpp"
#include "test_support.hpp"

using namespace netreg;

TEST_SUITE_BEGIN("projection");

TEST_CASE("inputs already in the cone are fixed points") {
  std::mt19937_64 rng(41);
  const GraphLaplacian lap = testing::random_laplacian(5, rng);
  const ProjectionResult result = project_to_laplacian(SymmetricMatrix(lap.matrix()));
  CHECK((result.laplacian.matrix() - lap.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(result.objective <= 1e-16);
  CHECK(result.kkt_residual <= 1e-8);
}

TEST_CASE("all-positive off-diagonal projects to zero") {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  const ProjectionResult result = project_to_laplacian(SymmetricMatrix(s));
  CHECK(result.laplacian.matrix().cwiseAbs().maxCoeff() == 0.0);
  CHECK(result.objective == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("matches the brute-force enumeration oracle on random 3x3 input") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd s = testing::random_symmetric(3, rng, 2.0);
    const ProjectionResult result = project_to_laplacian(SymmetricMatrix(s));
    const Eigen::MatrixXd oracle = testing::brute_force_project(s);
    CHECK((result.laplacian.matrix() - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(result.kkt_residual <= 1e-8);
  }
}

TEST_CASE("idempotence") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd s = testing::random_symmetric(4, rng, 1.5);
    const GraphLaplacian once = project_to_laplacian(SymmetricMatrix(s)).laplacian;
    const GraphLaplacian twice =
        project_to_laplacian(SymmetricMatrix(once.matrix())).laplacian;
    CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("projection result satisfies the Laplacian constraints") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd s = testing::random_symmetric(5, rng, 2.0);
    const ProjectionResult result = project_to_laplacian(SymmetricMatrix(s));
    CHECK(validate_laplacian(result.laplacian.matrix(), 1e-9).ok);
    CHECK(result.objective ==
          doctest::Approx((s - result.laplacian.matrix()).squaredNorm())
              .epsilon(1e-9));
  }
}

TEST_CASE("no feasible competitor is closer") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd s = testing::random_symmetric(4, rng, 2.0);
    const ProjectionResult result = project_to_laplacian(SymmetricMatrix(s));
    const GraphLaplacian competitor = testing::random_laplacian(4, rng);
    CHECK((s - result.laplacian.matrix()).norm() <=
          (s - competitor.matrix()).norm() + 1e-9);
  }
}

TEST_CASE("repeated calls are bitwise identical") {
  std::mt19937_64 rng(46);
  const Eigen::MatrixXd s = testing::random_symmetric(6, rng, 1.0);
  const ProjectionResult first = project_to_laplacian(SymmetricMatrix(s));
  const ProjectionResult second = project_to_laplacian(SymmetricMatrix(s));
  CHECK((first.laplacian.matrix().array() == second.laplacian.matrix().array())
            .all());
  CHECK(first.objective == second.objective);
  CHECK(first.kkt_residual == second.kkt_residual);
}

TEST_CASE("iteration budget exhaustion carries the best iterate") {
  std::mt19937_64 rng(47);
  // m = 35 exceeds the active-set size limit, so the gradient path runs and a
  // one-iteration budget cannot converge.
  const Eigen::MatrixXd s = testing::random_symmetric(35, rng, 1.0);
  try {
    project_to_laplacian(SymmetricMatrix(s), 1e-10, 1);
    FAIL("expected ProjectionConvergenceError");
  } catch (const ProjectionConvergenceError& err) {
    CHECK(err.residual() > 1e-10);
    CHECK(err.iterations() >= 1);
    CHECK(err.best_iterate().size() == 35);
  }
}

TEST_CASE("large inputs use the gradient path and still satisfy KKT") {
  std::mt19937_64 rng(48);
  const Eigen::Index m = 35;  // 595 edge variables
  SUBCASE("random symmetric input") {
    const Eigen::MatrixXd s = testing::random_symmetric(m, rng, 1.0);
    const ProjectionResult result = project_to_laplacian(SymmetricMatrix(s));
    CHECK(result.kkt_residual <= 1e-8);
    CHECK(validate_laplacian(result.laplacian.matrix(), 1e-9).ok);
    const GraphLaplacian competitor = testing::random_laplacian(m, rng);
    CHECK((s - result.laplacian.matrix()).norm() <=
          (s - competitor.matrix()).norm() + 1e-9);
  }
  SUBCASE("near-Laplacian input round trips") {
    const GraphLaplacian lap = testing::random_laplacian(m, rng);
    const ProjectionResult result =
        project_to_laplacian(SymmetricMatrix(lap.matrix()));
    CHECK((result.laplacian.matrix() - lap.matrix()).cwiseAbs().maxCoeff() <=
          1e-7);
  }
}

TEST_CASE("asymmetric input handling") {
  Eigen::MatrixXd nearly(2, 2);
  nearly << 0, 1.0, 1.0 + 1e-12, 0;
  CHECK_NOTHROW(SymmetricMatrix{nearly});

  Eigen::MatrixXd badly(2, 2);
  badly << 0, 1.0, 1.001, 0;
  CHECK_THROWS_AS(SymmetricMatrix{badly}, DataError);
}

TEST_CASE("pipeline_to_laplacian") {
  std::mt19937_64 rng(49);

  SUBCASE("round trip at alpha = 1") {
    const GraphLaplacian lap = testing::random_laplacian(6, rng);
    const GraphLaplacian back =
        pipeline_to_laplacian(to_tangent(lap, PowerConfig(1.0)));
    CHECK((back.matrix() - lap.matrix()).cwiseAbs().maxCoeff() <= 1e-7);
  }

  SUBCASE("round trip at alpha = 1/2") {
    const GraphLaplacian lap = testing::random_laplacian(6, rng);
    const GraphLaplacian back =
        pipeline_to_laplacian(to_tangent(lap, PowerConfig(0.5)));
    CHECK((back.matrix() - lap.matrix()).cwiseAbs().maxCoeff() <= 1e-7);
  }

  SUBCASE("zero vector maps to the zero Laplacian") {
    const GraphLaplacian zero =
        pipeline_to_laplacian(TangentVector(Eigen::VectorXd::Zero(10), 5, 0.5));
    CHECK(zero.matrix().cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_SUITE_END();
