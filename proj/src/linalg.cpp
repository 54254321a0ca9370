#include "vclab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vclab {

Matrix symmetrize(const Matrix& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("symmetrize: matrix must be square");
  Matrix s = x;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) s(j, i) = s(i, j);
  return s;
}

SpectralDecomposition eig_sym(const Matrix& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("eig_sym: matrix must be square");
  if (!x.allFinite()) throw std::invalid_argument("eig_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_sym: decomposition failed");
  const Eigen::Index n = x.rows();
  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues().reverse();
  dec.eigenvectors = solver.eigenvectors().rowwise().reverse();
  (void)n;
  return dec;
}

Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

Matrix schur(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument("schur: size mismatch");
  return x.cwiseProduct(y);
}

namespace {

double rank_threshold(const Vector& eigenvalues, double tol) {
  double top = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return tol * std::max(1.0, top);
}

}  // namespace

int numeric_rank(const Matrix& x, double tol) {
  auto dec = eig_sym(x);
  double thr = rank_threshold(dec.eigenvalues, tol);
  int rank = 0;
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
    if (std::abs(dec.eigenvalues[i]) > thr) ++rank;
  return rank;
}

Matrix kernel_basis(const Matrix& x, double tol) {
  auto dec = eig_sym(x);
  double thr = rank_threshold(dec.eigenvalues, tol);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
    if (std::abs(dec.eigenvalues[i]) <= thr) cols.push_back(i);
  Matrix basis(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = dec.eigenvectors.col(cols[c]);
  return basis;
}

CholeskyReport cholesky_psd(const Matrix& x, double tol) {
  auto dec = eig_sym(symmetrize(x));
  CholeskyReport report;
  const Eigen::Index n = x.rows();
  double top = n ? dec.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  double lambda_min = n ? dec.eigenvalues[n - 1] : 0.0;
  report.min_eigenvalue = lambda_min;
  if (lambda_min < -tol * std::max(1.0, top)) {
    report.ok = false;
    report.witness = dec.eigenvectors.col(n - 1);
    report.witness_value = lambda_min;
    return report;
  }
  report.ok = true;
  double shift = std::max(0.0, -lambda_min) + tol * std::max(1.0, top);
  Matrix shifted = symmetrize(x);
  shifted.diagonal().array() += shift;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    // Eigenvalue analysis says PSD within tolerance, so a slightly larger
    // shift has to factor.
    shifted.diagonal().array() += 10 * shift + 1e-14;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) throw std::runtime_error("cholesky_psd: factorization failed");
  }
  report.factor = llt.matrixL();
  return report;
}

NnlsResult nnls_membership(const Vector& target, const std::vector<Vector>& generators, double tol) {
  const Eigen::Index dim = target.size();
  const int k = static_cast<int>(generators.size());
  for (const auto& g : generators)
    if (g.size() != dim) throw std::invalid_argument("nnls_membership: dimension mismatch");

  NnlsResult result;
  result.coefficients = Vector::Zero(k);
  if (k == 0) {
    result.residual = target.norm();
    result.feasible = result.residual <= tol * (1.0 + target.norm());
    return result;
  }

  Matrix a(dim, k);
  for (int j = 0; j < k; ++j) a.col(j) = generators[j];

  // Lawson-Hanson active set. Ties break toward the smallest index.
  std::vector<bool> passive(k, false);
  Vector x = Vector::Zero(k);
  Vector resid = target;
  const double w_tol = 1e-12 * std::max(1.0, (a.transpose() * target).cwiseAbs().maxCoeff());
  const int max_outer = 3 * k + 10;

  auto solve_passive = [&](const std::vector<bool>& mask) {
    std::vector<int> idx;
    for (int j = 0; j < k; ++j)
      if (mask[j]) idx.push_back(j);
    Matrix sub(dim, static_cast<Eigen::Index>(idx.size()));
    for (size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    Vector z = sub.colPivHouseholderQr().solve(target);
    Vector full = Vector::Zero(k);
    for (size_t c = 0; c < idx.size(); ++c) full[idx[c]] = z[static_cast<Eigen::Index>(c)];
    return full;
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    Vector w = a.transpose() * resid;
    int best = -1;
    double best_w = w_tol;
    for (int j = 0; j < k; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < max_outer; ++inner) {
      Vector z = solve_passive(passive);
      bool all_positive = true;
      for (int j = 0; j < k; ++j)
        if (passive[j] && z[j] <= 0) all_positive = false;
      if (all_positive) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (int j = 0; j < k; ++j)
        if (passive[j] && z[j] <= 0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (int j = 0; j < k; ++j)
        if (passive[j] && x[j] <= 1e-14) {
          passive[j] = false;
          x[j] = 0.0;
        }
    }
    resid = target - a * x;
  }

  result.coefficients = x.cwiseMax(0.0);
  result.residual = (target - a * result.coefficients).norm();
  result.feasible = result.residual <= tol * (1.0 + target.norm());
  return result;
}

namespace {

// Dense tableau simplex with Bland's rule. Rows are equalities over
// nonnegative variables; callers have already shifted out bounds and slacks.
struct Tableau {
  Matrix body;  // rows x (cols + 1), last column is the rhs
  std::vector<int> basis;

  double& at(int r, int c) { return body(r, c); }
  int rows() const { return static_cast<int>(body.rows()); }
  int cols() const { return static_cast<int>(body.cols()) - 1; }

  void pivot(int row, int col) {
    body.row(row) /= body(row, col);
    for (int r = 0; r < rows(); ++r) {
      if (r == row) continue;
      double f = body(r, col);
      if (f != 0.0) body.row(r) -= f * body.row(row);
    }
    basis[row] = col;
  }

  // Returns false when the objective row has no improving column.
  bool bland_step(const Vector& reduced, double eps, int restrict_cols) {
    int enter = -1;
    for (int c = 0; c < restrict_cols; ++c)
      if (reduced[c] < -eps) {
        enter = c;
        break;
      }
    if (enter < 0) return false;
    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < rows(); ++r) {
      double coef = body(r, enter);
      if (coef > eps) {
        double ratio = body(r, cols()) / coef;
        if (leave < 0 || ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("lp_solve: unbounded pivot despite box constraints");
    pivot(leave, enter);
    return true;
  }
};

Vector reduced_costs(const Tableau& t, const Vector& costs) {
  int rows = static_cast<int>(t.body.rows());
  int cols = static_cast<int>(t.body.cols()) - 1;
  Vector dual = Vector::Zero(rows);
  for (int r = 0; r < rows; ++r) dual[r] = costs[t.basis[r]];
  Vector reduced(cols);
  for (int c = 0; c < cols; ++c) reduced[c] = costs[c] - dual.dot(t.body.col(c));
  return reduced;
}

}  // namespace

LpResult lp_solve(const LinearProgram& lp) {
  const int nv = static_cast<int>(lp.lower.size());
  if (lp.upper.size() != nv) throw std::invalid_argument("lp_solve: box bounds required on every variable");
  for (int j = 0; j < nv; ++j)
    if (!(lp.lower[j] <= lp.upper[j])) throw std::invalid_argument("lp_solve: empty box");
  const int ne = static_cast<int>(lp.eq_rhs.size());
  const int ni = static_cast<int>(lp.ineq_rhs.size());
  if (ne > 0 && lp.eq_lhs.cols() != nv) throw std::invalid_argument("lp_solve: eq size mismatch");
  if (ni > 0 && lp.ineq_lhs.cols() != nv) throw std::invalid_argument("lp_solve: ineq size mismatch");

  // Shift to z = x - lower >= 0; add slacks for inequalities and upper bounds.
  const int rows = ne + ni + nv;
  const int structural = nv + ni + nv;  // z, ineq slack, upper-bound slack
  const int total = structural + rows;  // plus one artificial per row
  Matrix lhs = Matrix::Zero(rows, total);
  Vector rhs = Vector::Zero(rows);
  for (int r = 0; r < ne; ++r) {
    lhs.row(r).head(nv) = lp.eq_lhs.row(r);
    rhs[r] = lp.eq_rhs[r] - lp.eq_lhs.row(r).dot(lp.lower);
  }
  for (int r = 0; r < ni; ++r) {
    lhs.row(ne + r).head(nv) = lp.ineq_lhs.row(r);
    lhs(ne + r, nv + r) = 1.0;
    rhs[ne + r] = lp.ineq_rhs[r] - lp.ineq_lhs.row(r).dot(lp.lower);
  }
  for (int j = 0; j < nv; ++j) {
    lhs(ne + ni + j, j) = 1.0;
    lhs(ne + ni + j, nv + ni + j) = 1.0;
    rhs[ne + ni + j] = lp.upper[j] - lp.lower[j];
  }
  for (int r = 0; r < rows; ++r)
    if (rhs[r] < 0) {
      lhs.row(r) *= -1.0;
      rhs[r] *= -1.0;
    }
  for (int r = 0; r < rows; ++r) lhs(r, structural + r) = 1.0;

  Tableau tab;
  tab.body.resize(rows, total + 1);
  tab.body.leftCols(total) = lhs;
  tab.body.col(total) = rhs;
  tab.basis.resize(rows);
  for (int r = 0; r < rows; ++r) tab.basis[r] = structural + r;

  const double eps = 1e-10;

  // Phase 1: minimize the sum of artificials.
  Vector phase1 = Vector::Zero(total);
  phase1.tail(rows).setOnes();
  for (int iter = 0; iter < 50000; ++iter) {
    Vector reduced = reduced_costs(tab, phase1);
    if (!tab.bland_step(reduced, eps, structural)) break;
  }
  double infeas = 0.0;
  for (int r = 0; r < rows; ++r)
    if (tab.basis[r] >= structural) infeas += tab.body(r, total);
  if (infeas > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
    return LpResult{LpResult::Status::Infeasible, Vector(), 0.0};
  }
  // Drive lingering artificials out of the basis.
  for (int r = 0; r < rows; ++r) {
    if (tab.basis[r] < structural) continue;
    int col = -1;
    for (int c = 0; c < structural; ++c)
      if (std::abs(tab.body(r, c)) > eps) {
        col = c;
        break;
      }
    if (col >= 0) tab.pivot(r, col);
  }

  // Phase 2 on the real objective.
  Vector costs = Vector::Zero(total);
  if (lp.objective.size() > 0) {
    if (lp.objective.size() != nv) throw std::invalid_argument("lp_solve: objective size mismatch");
    costs.head(nv) = lp.objective;
  }
  costs.tail(rows).setConstant(1e30);  // artificials must stay out
  for (int iter = 0; iter < 50000; ++iter) {
    Vector reduced = reduced_costs(tab, costs);
    if (!tab.bland_step(reduced, eps, structural)) break;
  }

  Vector z = Vector::Zero(total);
  for (int r = 0; r < rows; ++r) z[tab.basis[r]] = tab.body(r, total);
  LpResult result;
  result.status = LpResult::Status::Optimal;
  result.x = lp.lower + z.head(nv);
  result.value = lp.objective.size() > 0 ? lp.objective.dot(result.x) : 0.0;
  return result;
}

LpResult lp_feasible(const LinearProgram& lp) {
  LinearProgram copy = lp;
  copy.objective = Vector();
  return lp_solve(copy);
}

}  // namespace vclab
