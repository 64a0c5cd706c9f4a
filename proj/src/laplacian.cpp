#include "netreg/laplacian.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "netreg/format.hpp"

namespace netreg {

namespace {

std::string entry_name(const std::vector<std::string>& labels, Eigen::Index i,
                       Eigen::Index j) {
  std::ostringstream os;
  os << "(" << labels[static_cast<std::size_t>(i)] << ","
     << labels[static_cast<std::size_t>(j)] << ")";
  return os.str();
}

}  // namespace

WeightedNetwork::WeightedNetwork(std::vector<std::string> node_labels,
                                 Eigen::MatrixXd weights)
    : node_labels_(std::move(node_labels)), weights_(std::move(weights)) {
  const Eigen::Index m = weights_.rows();
  if (m == 0 || weights_.cols() != m) {
    throw DataError("WeightedNetwork: weights must be a nonempty square matrix");
  }
  if (static_cast<Eigen::Index>(node_labels_.size()) != m) {
    throw DataError("WeightedNetwork: " + std::to_string(node_labels_.size()) +
                    " labels for " + std::to_string(m) + " nodes");
  }
  std::set<std::string> seen;
  for (const auto& label : node_labels_) {
    if (!seen.insert(label).second) {
      throw DataError("WeightedNetwork: duplicate node label '" + label + "'");
    }
  }
  if (!weights_.allFinite()) {
    throw DataError("WeightedNetwork: non-finite weight");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (weights_(i, i) != 0.0) {
      throw DataError("WeightedNetwork: nonzero diagonal (self-loop) at " +
                      entry_name(node_labels_, i, i) + ": " +
                      format_double(weights_(i, i)));
    }
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (weights_(i, j) != weights_(j, i)) {
        throw DataError("WeightedNetwork: asymmetric weights at " +
                        entry_name(node_labels_, i, j) + ": " +
                        format_double(weights_(i, j)) + " vs " +
                        format_double(weights_(j, i)));
      }
      if (weights_(i, j) < 0.0) {
        throw DataError("WeightedNetwork: negative weight at " +
                        entry_name(node_labels_, i, j) + ": " +
                        format_double(weights_(i, j)));
      }
    }
  }
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd mat) {
  if (mat.rows() != mat.cols()) {
    throw DataError("SymmetricMatrix: matrix is not square (" +
                    std::to_string(mat.rows()) + "x" +
                    std::to_string(mat.cols()) + ")");
  }
  double gap = 0.0;
  double scale = 1.0;
  for (Eigen::Index j = 0; j < mat.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      gap = std::max(gap, std::abs(mat(i, j) - mat(j, i)));
      scale = std::max({scale, std::abs(mat(i, j)), std::abs(mat(j, i))});
    }
  }
  if (gap > 1e-9 * scale) {
    throw DataError("SymmetricMatrix: asymmetry " + format_double(gap) +
                    " exceeds tolerance " + format_double(1e-9 * scale));
  }
  mat_ = 0.5 * (mat + mat.transpose()).eval();
}

GraphLaplacian::GraphLaplacian(Eigen::MatrixXd mat, double tol) {
  LaplacianDiagnostics diag = validate_laplacian(mat, tol);
  if (!diag.ok) {
    std::string msg = "GraphLaplacian: invalid matrix:";
    for (const auto& f : diag.failures) msg += " [" + f + "]";
    throw DataError(msg);
  }
  mat_ = 0.5 * (mat + mat.transpose()).eval();
}

GraphLaplacian GraphLaplacian::unchecked(Eigen::MatrixXd mat) {
  GraphLaplacian out;
  out.mat_ = std::move(mat);
  return out;
}

GraphLaplacian laplacian_from_network(const WeightedNetwork& net) {
  const Eigen::Index m = net.size();
  const Eigen::MatrixXd& w = net.weights();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double degree = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k == i) continue;
      degree += w(i, k);
      lap(i, k) = -w(i, k);
    }
    lap(i, i) = degree;
  }
  return GraphLaplacian::unchecked(std::move(lap));
}

LaplacianDiagnostics validate_laplacian(const Eigen::MatrixXd& mat, double tol) {
  LaplacianDiagnostics diag;
  if (mat.rows() != mat.cols()) {
    diag.failures.push_back("not square: " + std::to_string(mat.rows()) + "x" +
                            std::to_string(mat.cols()));
    return diag;
  }
  if (!mat.allFinite()) {
    diag.failures.push_back("non-finite entry");
    return diag;
  }
  const Eigen::Index m = mat.rows();
  diag.threshold = tol * std::max(1.0, mat.norm());

  Eigen::Index sym_i = 0, sym_j = 0, off_i = 0, off_j = 0, row_i = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double gap = std::abs(mat(i, j) - mat(j, i));
      if (gap > diag.symmetry_gap) {
        diag.symmetry_gap = gap;
        sym_i = i;
        sym_j = j;
      }
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const double excess = std::max(0.0, mat(i, j));
      if (excess > diag.off_diagonal_gap) {
        diag.off_diagonal_gap = excess;
        off_i = i;
        off_j = j;
      }
    }
    const double rs = std::abs(mat.row(i).sum());
    if (rs > diag.row_sum_gap) {
      diag.row_sum_gap = rs;
      row_i = i;
    }
  }

  if (diag.symmetry_gap > diag.threshold) {
    diag.failures.push_back("symmetry: |M(" + std::to_string(sym_i) + "," +
                            std::to_string(sym_j) + ") - M(" +
                            std::to_string(sym_j) + "," + std::to_string(sym_i) +
                            ")| = " + format_double(diag.symmetry_gap));
  }
  if (diag.off_diagonal_gap > diag.threshold) {
    diag.failures.push_back("off-diagonal sign: M(" + std::to_string(off_i) +
                            "," + std::to_string(off_j) + ") = " +
                            format_double(mat(off_i, off_j)));
  }
  if (diag.row_sum_gap > diag.threshold) {
    diag.failures.push_back("row sum: row " + std::to_string(row_i) +
                            " sums to " + format_double(mat.row(row_i).sum()));
  }
  diag.ok = diag.failures.empty();
  return diag;
}

GraphLaplacian trace_normalize(const GraphLaplacian& L) {
  const double tr = L.matrix().trace();
  if (!(tr > 0.0)) {
    throw DataError("trace_normalize: trace is " + format_double(tr) +
                    " (empty network?)");
  }
  return GraphLaplacian::unchecked(L.matrix() / tr);
}

double euclidean_distance(const GraphLaplacian& L1, const GraphLaplacian& L2) {
  if (L1.size() != L2.size()) {
    throw DataError("euclidean_distance: dimension mismatch (" +
                    std::to_string(L1.size()) + " vs " +
                    std::to_string(L2.size()) + ")");
  }
  return (L1.matrix() - L2.matrix()).norm();
}

}  // namespace netreg
