#pragma once

#include <vector>

#include <Eigen/Dense>

namespace vclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative threshold for rank decisions, deliberately coarser than
/// the solver tolerance so rank counts are robust to residual noise.
inline constexpr double kRankTol = 1e-6;

/// Copies the lower triangle over the upper one, making both exactly equal.
Matrix symmetrize(const Matrix& x);

struct SpectralDecomposition {
  Vector eigenvalues;   // nonincreasing
  Matrix eigenvectors;  // orthonormal columns, paired with eigenvalues
};

/// Full spectral decomposition of a symmetric matrix (lower triangle read).
/// Deterministic for fixed input; rejects non-finite entries.
SpectralDecomposition eig_sym(const Matrix& x);

Matrix kron(const Matrix& x, const Matrix& y);
Matrix schur(const Matrix& x, const Matrix& y);

/// Number of eigenvalues with |lambda| > tol * max(1, |lambda|_max).
int numeric_rank(const Matrix& x, double tol = kRankTol);

/// Orthonormal basis of the complementary eigenspace; numeric_rank(x) +
/// cols(kernel_basis(x)) == n always.
Matrix kernel_basis(const Matrix& x, double tol = kRankTol);

struct CholeskyReport {
  bool ok = false;
  Matrix factor;          // lower triangular, set when ok
  Vector witness;         // unit vector with witness_value = v'Xv < 0, set when !ok
  double witness_value = 0.0;
  double min_eigenvalue = 0.0;
};

/// PSD membership test: succeeds iff lambda_min(X) >= -tol * max(1, ||X||),
/// returning a lower-triangular factor of a tol-shifted copy; otherwise a
/// violation report carrying the most negative eigenpair.
CholeskyReport cholesky_psd(const Matrix& x, double tol = 1e-9);

struct NnlsResult {
  bool feasible = false;
  Vector coefficients;  // one per generator, nonnegative
  double residual = 0.0;
};

/// Conical-hull membership: nonnegative alpha with ||sum alpha_j g_j - target||
/// <= tol * (1 + ||target||), via Lawson-Hanson active sets. When infeasible the
/// result carries the best nonnegative fit and its residual.
NnlsResult nnls_membership(const Vector& target, const std::vector<Vector>& generators, double tol);

/// minimize objective'x subject to eq_lhs x = eq_rhs, ineq_lhs x <= ineq_rhs,
/// lower <= x <= upper. Empty objective means pure feasibility. The box is
/// mandatory, so the program is always bounded.
struct LinearProgram {
  Vector objective;
  Matrix eq_lhs;
  Vector eq_rhs;
  Matrix ineq_lhs;
  Vector ineq_rhs;
  Vector lower;
  Vector upper;
};

struct LpResult {
  enum class Status { Optimal, Infeasible };
  Status status = Status::Infeasible;
  Vector x;
  double value = 0.0;
};

/// Dense two-phase simplex with Bland's rule (deterministic pivoting).
LpResult lp_solve(const LinearProgram& lp);
LpResult lp_feasible(const LinearProgram& lp);

}  // namespace vclab
