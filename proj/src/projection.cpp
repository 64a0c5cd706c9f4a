#include "netreg/projection.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "netreg/format.hpp"

namespace netreg {

namespace {

// Problem data for min_{a >= 0} ||S - L(a)||_F^2 over edge weights a_e,
// e = (p,q) with p < q in row-major upper-triangle order. The Gram matrix of
// the parameterization has the closed form G(e,e) = 4, G(e,f) = 1 when e and
// f share exactly one endpoint, 0 otherwise; its eigenvalues lie in [2, 2m].
struct ConeProblem {
  Eigen::Index m = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  Eigen::VectorXd b;  // b_e = S(p,p) + S(q,q) - 2 S(p,q)

  explicit ConeProblem(const Eigen::MatrixXd& s) : m(s.rows()) {
    const Eigen::Index nv = m * (m - 1) / 2;
    edges.reserve(static_cast<std::size_t>(nv));
    b.resize(nv);
    Eigen::Index e = 0;
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        edges.emplace_back(p, q);
        b(e++) = s(p, p) + s(q, q) - 2.0 * s(p, q);
      }
    }
  }

  Eigen::Index num_vars() const { return b.size(); }

  Eigen::VectorXd row_sums(const Eigen::VectorXd& a) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      r(edges[e].first) += a(static_cast<Eigen::Index>(e));
      r(edges[e].second) += a(static_cast<Eigen::Index>(e));
    }
    return r;
  }

  // Gradient of ||S - L(a)||_F^2.
  Eigen::VectorXd gradient(const Eigen::VectorXd& a) const {
    const Eigen::VectorXd r = row_sums(a);
    Eigen::VectorXd g(a.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [p, q] = edges[e];
      const Eigen::Index ei = static_cast<Eigen::Index>(e);
      g(ei) = 2.0 * (2.0 * a(ei) + r(p) + r(q) - b(ei));
    }
    return g;
  }

  double kkt_residual(const Eigen::VectorXd& a) const {
    const Eigen::VectorXd g = gradient(a);
    double res = 0.0;
    for (Eigen::Index e = 0; e < a.size(); ++e) {
      res = std::max(res, a(e) > 0.0 ? std::abs(g(e)) : std::max(0.0, -g(e)));
    }
    return res;
  }

  Eigen::MatrixXd laplacian_of(const Eigen::VectorXd& a) const {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [p, q] = edges[e];
      const double w = a(static_cast<Eigen::Index>(e));
      lap(p, q) = -w;
      lap(q, p) = -w;
      lap(p, p) += w;
      lap(q, q) += w;
    }
    return lap;
  }
};

double gram_entry(const ConeProblem& prob, Eigen::Index e, Eigen::Index f) {
  if (e == f) return 4.0;
  const auto [p1, q1] = prob.edges[static_cast<std::size_t>(e)];
  const auto [p2, q2] = prob.edges[static_cast<std::size_t>(f)];
  const bool share = (p1 == p2) || (p1 == q2) || (q1 == p2) || (q1 == q2);
  return share ? 1.0 : 0.0;
}

// Lawson-Hanson style active set on the normal equations. Exact passive-set
// solves give exact-support solutions and near-machine KKT residuals.
Eigen::VectorXd solve_active_set(const ConeProblem& prob, double tol,
                                 long max_iter, long& iterations) {
  const Eigen::Index nv = prob.num_vars();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(nv);
  std::vector<Eigen::Index> passive;
  std::vector<char> in_passive(static_cast<std::size_t>(nv), 0);
  std::vector<char> rejected(static_cast<std::size_t>(nv), 0);

  auto solve_passive = [&](Eigen::VectorXd& z) {
    const Eigen::Index np = static_cast<Eigen::Index>(passive.size());
    Eigen::MatrixXd gram(np, np);
    Eigen::VectorXd rhs(np);
    for (Eigen::Index i = 0; i < np; ++i) {
      rhs(i) = prob.b(passive[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < np; ++j) {
        gram(i, j) = gram_entry(prob, passive[static_cast<std::size_t>(i)],
                                passive[static_cast<std::size_t>(j)]);
      }
    }
    z = gram.ldlt().solve(rhs);
  };

  while (true) {
    // Dual vector w = b - G a = -gradient/2.
    const Eigen::VectorXd w = -0.5 * prob.gradient(a);

    Eigen::Index candidate = -1;
    double wmax = tol / 2.0;
    for (Eigen::Index e = 0; e < nv; ++e) {
      if (in_passive[static_cast<std::size_t>(e)] ||
          rejected[static_cast<std::size_t>(e)])
        continue;
      if (w(e) > wmax) {
        wmax = w(e);
        candidate = e;
      }
    }
    if (candidate < 0) break;

    passive.insert(std::lower_bound(passive.begin(), passive.end(), candidate),
                   candidate);
    in_passive[static_cast<std::size_t>(candidate)] = 1;

    bool candidate_ok = true;
    while (true) {
      if (++iterations > max_iter) {
        throw ProjectionConvergenceError(
            "project_to_laplacian: iteration budget " +
                std::to_string(max_iter) + " exhausted (KKT residual " +
                format_double(prob.kkt_residual(a)) + ")",
            prob.kkt_residual(a), iterations,
            GraphLaplacian::unchecked(prob.laplacian_of(a)));
      }
      Eigen::VectorXd z;
      solve_passive(z);

      // Numerical stall guard: a freshly added variable whose passive solve
      // is nonpositive cannot make progress; reject it for this pass.
      const auto cand_pos = std::lower_bound(passive.begin(), passive.end(),
                                             candidate) - passive.begin();
      if (in_passive[static_cast<std::size_t>(candidate)] &&
          z(cand_pos) <= 0.0 && a(candidate) == 0.0) {
        passive.erase(passive.begin() + cand_pos);
        in_passive[static_cast<std::size_t>(candidate)] = 0;
        rejected[static_cast<std::size_t>(candidate)] = 1;
        candidate_ok = false;
        break;
      }

      bool feasible = true;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z(i) <= 0.0) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          a(passive[static_cast<std::size_t>(i)]) = z(i);
        }
        break;
      }

      // Step toward z until the first passive variable hits zero.
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z(i) <= 0.0) {
          const double ai = a(passive[static_cast<std::size_t>(i)]);
          alpha = std::min(alpha, ai / (ai - z(i)));
        }
      }
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const Eigen::Index e = passive[static_cast<std::size_t>(i)];
        a(e) += alpha * (z(i) - a(e));
      }
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const Eigen::Index e = passive[static_cast<std::size_t>(i)];
        if (z(i) <= 0.0 && a(e) <= 0.0) a(e) = 0.0;
      }
      std::vector<Eigen::Index> still;
      still.reserve(passive.size());
      for (Eigen::Index e : passive) {
        if (a(e) > 0.0) {
          still.push_back(e);
        } else {
          a(e) = 0.0;
          in_passive[static_cast<std::size_t>(e)] = 0;
        }
      }
      passive = std::move(still);
      if (passive.empty()) break;
    }
    if (candidate_ok) {
      std::fill(rejected.begin(), rejected.end(), 0);
    }
  }
  return a;
}

// Nesterov-accelerated projected gradient with the exact curvature constants
// of the closed-form Gram matrix (smoothness 4m, strong convexity 4).
Eigen::VectorXd solve_projected_gradient(const ConeProblem& prob, double tol,
                                         long max_iter, long& iterations) {
  const double step = 1.0 / (4.0 * static_cast<double>(prob.m));
  const double sqrt_kappa = std::sqrt(static_cast<double>(prob.m));
  const double beta = (sqrt_kappa - 1.0) / (sqrt_kappa + 1.0);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(prob.num_vars());
  Eigen::VectorXd y = x;
  Eigen::VectorXd best = x;
  double best_kkt = prob.kkt_residual(x);
  double last_window_kkt = best_kkt;

  for (long k = 1; k <= max_iter; ++k) {
    ++iterations;
    const Eigen::VectorXd g = prob.gradient(y);
    Eigen::VectorXd x_new = (y - step * g).cwiseMax(0.0);
    y = x_new + beta * (x_new - x);
    x = std::move(x_new);

    if (k % 16 == 0) {
      const double kkt = prob.kkt_residual(x);
      if (kkt < best_kkt) {
        best_kkt = kkt;
        best = x;
      }
      if (kkt <= tol) return x;
      if (k % 256 == 0) {
        if (kkt >= last_window_kkt) y = x;  // momentum restart on stall
        last_window_kkt = kkt;
      }
    }
  }
  const double kkt = prob.kkt_residual(x);
  if (kkt <= tol) return x;
  if (kkt < best_kkt) {
    best_kkt = kkt;
    best = x;
  }
  throw ProjectionConvergenceError(
      "project_to_laplacian: iteration budget " + std::to_string(max_iter) +
          " exhausted (KKT residual " + format_double(best_kkt) + ")",
      best_kkt, iterations, GraphLaplacian::unchecked(prob.laplacian_of(best)));
}

constexpr Eigen::Index kActiveSetLimit = 512;

}  // namespace

ProjectionResult project_to_laplacian(const SymmetricMatrix& mat, double tol,
                                      long max_iter) {
  if (!mat.matrix().allFinite()) {
    throw DataError("project_to_laplacian: non-finite entries");
  }
  if (!(tol > 0.0)) {
    throw DataError("project_to_laplacian: tol must be positive");
  }
  const Eigen::Index m = mat.size();
  if (max_iter <= 0) max_iter = 50 * static_cast<long>(m) * static_cast<long>(m);

  if (m == 1) {
    ProjectionResult out{GraphLaplacian::unchecked(Eigen::MatrixXd::Zero(1, 1)),
                         mat.matrix()(0, 0) * mat.matrix()(0, 0), 0, 0.0};
    return out;
  }

  const ConeProblem prob(mat.matrix());
  long iterations = 0;
  const Eigen::VectorXd a =
      prob.num_vars() <= kActiveSetLimit
          ? solve_active_set(prob, tol, max_iter, iterations)
          : solve_projected_gradient(prob, tol, max_iter, iterations);

  Eigen::MatrixXd lap = prob.laplacian_of(a);
  const double kkt = prob.kkt_residual(a);
  if (kkt > tol) {
    throw ProjectionConvergenceError(
        "project_to_laplacian: terminated with KKT residual " +
            format_double(kkt) + " > tol " + format_double(tol),
        kkt, iterations, GraphLaplacian::unchecked(std::move(lap)));
  }
  const double objective = (mat.matrix() - lap).squaredNorm();
  return ProjectionResult{GraphLaplacian::unchecked(std::move(lap)), objective,
                          iterations, kkt};
}

GraphLaplacian pipeline_to_laplacian(const TangentVector& v,
                                     const ProjectionOptions& options) {
  const SymmetricMatrix embedded = from_tangent(v);
  const SymmetricMatrix reversed =
      inverse_power_map(embedded, PowerConfig(v.alpha));
  return project_to_laplacian(reversed, options.tol, options.max_iter).laplacian;
}

}  // namespace netreg
