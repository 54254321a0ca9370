#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vclab/graph.hpp"
#include "vclab/linalg.hpp"

namespace vclab {

/// One entry of a sparse symmetric coefficient matrix. (i,j) with i <= j
/// stands for the symmetric pair, so <A, X> picks up 2*value*X(i,j) for i < j.
struct SymEntry {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct ConicConstraint {
  std::vector<SymEntry> psd;
  std::vector<std::pair<int, double>> nonneg;
  double rhs = 0.0;
};

/// Standard-form conic program over one PSD block and one orthant block:
///   minimize <C1, X1> + c2'x2 + offset   s.t.   <A_k, X> = b_k,  X in cone.
/// Either block may be absent (size zero). Dependent constraint rows are
/// filtered before solving; an inconsistent dependent row is rejected.
struct ConicProblem {
  int psd_size = 0;
  int nonneg_size = 0;
  Matrix c_psd;
  Vector c_nonneg;
  double objective_offset = 0.0;
  std::vector<ConicConstraint> constraints;
};

struct SolveConfig {
  double tol = 1e-9;
  int max_iterations = 200;
};

struct ConicSolution {
  enum class Status { Optimal, IterationLimit, NumericalProblem };
  Status status = Status::NumericalProblem;
  std::string message;

  Matrix x_psd;
  Vector x_nonneg;
  Vector multipliers;
  Matrix z_psd;
  Vector z_nonneg;

  // All recomputed from the returned point, not copied from iteration state.
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;

  bool ok() const { return status == Status::Optimal; }
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector. Iterates approach the relative interior of both
/// optimal faces, so the returned pair is max-rank on each side.
ConicSolution solve(const ConicProblem& problem, const SolveConfig& config = {});

/// Encodes the vector-chromatic-number program of a graph. The PSD primal
/// block carries the Gram matrix M with its constant diagonal t-1 enforced
/// against the last vertex, edge inequalities M_ij <= -1 get one orthant
/// slack each, and the dual slack is exactly the matrix B of the edge-supported
/// trace-1 dual (its support restriction is structural, never a constraint).
ConicProblem vc_primal_problem(const Graph& g);

/// Strict variant: edge constraints are equalities M_ij = -1 (no orthant
/// block), so the optimum is the Lovasz theta number of the complement.
ConicProblem svc_primal_problem(const Graph& g);

/// Reassembles the dual multipliers of a vc/svc solve into the matrix B:
/// trace exactly 1, zero off the diagonal and edges. Throws when the
/// reassembled matrix is infeasible beyond tolerance.
Matrix vc_dual_extract(const ConicSolution& solution, const Graph& g);

/// Gram matrix and coloring value recovered from the primal side.
std::pair<Matrix, double> vc_primal_extract(const ConicSolution& solution, const Graph& g);

}  // namespace vclab
