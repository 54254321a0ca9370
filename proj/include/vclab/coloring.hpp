#pragma once

#include <string>
#include <vector>

#include "vclab/conic.hpp"
#include "vclab/graph.hpp"
#include "vclab/linalg.hpp"

namespace vclab {

/// Numeric knobs shared by the solver-facing operations. The two-tier scheme
/// keeps rank and tightness decisions decoupled from solve accuracy.
struct SolveParams {
  double solve_tol = 1e-9;
  double rank_tol = 1e-6;
  double tight_tol = 1e-6;
  int max_iterations = 200;
};

struct VectorColoring {
  double t = 1.0;
  Matrix gram;                    // n x n, PSD, diagonal t-1
  Matrix factors;                 // n x d with d = numeric_rank(gram)
  std::vector<Edge> tight_edges;  // edges with gram entry -1 within tolerance
};

struct DualWitness {
  Matrix b;          // feasible for the edge-supported trace-1 dual
  Graph support;     // graph of entries above 1e-8
  int corank = 0;
  bool positive_diagonal = false;
  bool connected = false;
};

/// Edge-supported nonnegative matrix A with I + A >= 0; the reformulated dual
/// whose objective is ||I + A||.
struct AForm {
  Matrix a;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  Vector perron;  // entrywise-nonnegative unit top eigenvector
};

struct ChiResult {
  double t = 1.0;
  VectorColoring coloring;
  DualWitness witness;
  int iterations = 0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double dual_value = 0.0;  // sum(B)
};

/// Vector chromatic number with max-rank primal and dual from the
/// interior-point solve. Throws on solver failure.
ChiResult chi_v(const Graph& g, const SolveParams& params = {});

struct StrictChiResult {
  double t = 1.0;
  int iterations = 0;
  double gap = 0.0;
};

/// Strict vector chromatic number (value only).
StrictChiResult chi_sv(const Graph& g, const SolveParams& params = {});

/// Factors a PSD Gram matrix into row vectors, one column per significant
/// eigenvalue, deterministically ordered by eigenvalue. Rejects matrices
/// indefinite beyond tolerance.
Matrix gram_to_vectors(const Matrix& m, double tol = kRankTol);

std::vector<Edge> tight_edges(const VectorColoring& vc, const Graph& g, double tol);

struct SkeletonResult {
  Graph graph;
  /// G(B) must sit inside the skeleton; false flags questionable interiority.
  bool dual_support_contained = true;
};

SkeletonResult skeleton(const ChiResult& chi, const Graph& g, double tight_tol);
SkeletonResult skeleton(const Graph& g, const SolveParams& params = {});

struct SlacknessReport {
  double mb_norm = 0.0;            // ||MB||_F
  double max_edge_product = 0.0;   // max over edges of |(M_ij+1) B_ij|
  double trace_direct = 0.0;       // tr(MB)
  double trace_identity = 0.0;     // (t - s) + sum over ordered adjacent pairs
  double identity_error = 0.0;
};

SlacknessReport complementary_slackness(const VectorColoring& vc, const DualWitness& dw, const Graph& g);

struct StrictComplementarityReport {
  int rank_primal = 0;
  int rank_dual = 0;
  bool verdict = false;
};

StrictComplementarityReport strict_complementarity(const VectorColoring& vc, const DualWitness& dw,
                                                   double tol = kRankTol);

/// Diagonal rescaling B -> D^{-1/2} B D^{-1/2} - I on the support of B; rows
/// with (numerically) zero diagonal are carried along as zero padding.
AForm b_to_a(const DualWitness& dw);

/// Reverse conversion B = (I + A) o uu^T with u the stored top eigenvector.
DualWitness a_to_b(const AForm& af, const Graph& g, double rank_tol = kRankTol);

/// Closed-form optimal pair for 1-walk-regular graphs: scaled least-eigenvalue
/// projector primal, scaled (A - tau I) dual. Rejects inputs that are empty,
/// irregular, or not 1-walk-regular.
ChiResult closed_form_1wr(const Graph& g, const SolveParams& params = {});

/// 1 - lambda_max(W)/lambda_min(W) for a nonzero, entrywise-nonnegative,
/// edge-supported W: a lower bound on the vector chromatic number.
double eigenvalue_bound(const Graph& g, const Matrix& w);

/// Helpers used by solver-facing ops: domain types assembled from raw matrices.
DualWitness make_dual_witness(const Matrix& b, int n, double rank_tol = kRankTol);
VectorColoring make_vector_coloring(const Matrix& gram, double t, const Graph& g,
                                    const SolveParams& params = {});

}  // namespace vclab
