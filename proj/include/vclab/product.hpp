#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vclab/coloring.hpp"
#include "vclab/graph.hpp"
#include "vclab/structure.hpp"

namespace vclab {

/// Coloring of G x H obtained by ignoring the H-coordinate: Gram = M (x) J.
/// When H has no edges the product is empty and the zero coloring is returned
/// instead.
VectorColoring induced_coloring(const VectorColoring& vc_g, const Graph& g, const Graph& h,
                                const SolveParams& params = {});

/// Direct sum (i,l) -> sqrt(alpha) p_i (+) sqrt(1-alpha) q_l of two colorings
/// at the same value; Gram = alpha (M (x) J) + (1-alpha) (J (x) N).
VectorColoring direct_sum(const VectorColoring& vc_g, const VectorColoring& vc_h, const Graph& g,
                          const Graph& h, double alpha, const SolveParams& params = {});

bool is_induced_by_g(const Matrix& gram, int n_g, int n_h, double tol);
bool is_induced_by_h(const Matrix& gram, int n_g, int n_h, double tol);

struct HedetniemiReport {
  double chi_g = 0.0, chi_h = 0.0, chi_product = 0.0;
  double min_value = 0.0;
  double identity_error = 0.0;
  bool identity_ok = false;
  bool certificate_built = false;
  double certificate_lambda_min = 0.0;  // of the Kronecker dual; -1 when valid
  double certificate_value = 0.0;       // ||I + A||; the min value when valid
  double certificate_error = 0.0;
  bool certificate_ok = false;
  bool strict_checked = false;
  double strict_g = 0.0, strict_h = 0.0, strict_product = 0.0;
  double strict_error = 0.0;
  bool strict_ok = false;
  bool pass = false;
};

/// Solves all three instances, checks chi_v(G x H) = min over factors, and
/// independently certifies the value with A = A_G (x) A_H / (t - 1) built from
/// the factors' optimal duals. Optionally spot-checks the strict variant.
HedetniemiReport verify_hedetniemi(const Graph& g, const Graph& h, const SolveParams& params = {},
                                   bool include_strict = false);

struct ConvexDecomposition {
  double alpha = 0.0;
  Matrix m_part;  // optimal Gram for the first factor (when 0 < alpha)
  Matrix n_part;  // optimal Gram for the second factor (when alpha < 1)
  double fit_residual = 0.0;
};

/// Fits Gram[(il),(jk)] = M_ij + N_lk by two-way means and searches a scalar
/// shift making both parts PSD and, after renormalization, optimal colorings
/// of their factors. Returns nothing when the additive fit or the shift
/// search fails.
std::optional<ConvexDecomposition> convex_decompose(const Matrix& gram, const Graph& g, const Graph& h,
                                                    double t, double tol);

enum class ProductCase { LessThan, Equal };
enum class ProductVerdict { AllInducedByG, AllConvexCombinations, Inconclusive };

struct ProductAnalysis {
  ProductCase kase = ProductCase::Equal;
  bool swapped = false;  // factors reordered so chi_g <= chi_h
  double chi_g = 0.0, chi_h = 0.0, chi_product = 0.0;
  int rk_g = 0, rk_h = 0, rk_product = 0;
  bool rk_g_certified = false;  // primal rank agrees with dual corank
  bool rk_h_certified = false;
  bool rk_product_certified = false;
  int rk_product_low = 0, rk_product_high = 0;  // bracket when uncertified
  ProductVerdict verdict = ProductVerdict::Inconclusive;
  double min_residual = 0.0;  // |chi_product - min(chi_g, chi_h)|
};

/// Rank bookkeeping for the two product theorems; every rank is trusted only
/// when the primal rank and the dual corank agree.
ProductAnalysis rank_accounting(const Graph& g, const Graph& h, const SolveParams& params = {});

enum class CorollaryStatus { Certified, HypothesisNotMet, ConstructionFailed };

struct CorollaryOutcome {
  CorollaryStatus status = CorollaryStatus::HypothesisNotMet;
  ProductCase kase = ProductCase::Equal;
  bool swapped = false;
  // Hypothesis checks on the factor duals.
  bool g_strictly_complementary = false;
  bool g_positive_diagonal = false;
  bool g_connected_dual = false;
  bool h_strictly_complementary = false;
  bool h_connected_dual = false;
  bool h_connected_graph = false;
  std::string failure_reason;
  // Construction trace.
  double epsilon_used = 0.0;
  double product_dual_value = 0.0;
  int product_corank = 0;
  int expected_corank = 0;
};

/// Builds the explicit product dual certificate of the corollary pipeline:
/// equal case A = A_G (x) A_H / lambda, smaller-factor case with the H-side
/// replaced by a perturbed almost-optimal solution, then converts back to a
/// dual matrix and checks its corank against the factor ranks.
CorollaryOutcome corollary_pipeline(const Graph& g, const Graph& h, const SolveParams& params = {});

struct NecessaryReport {
  ProductCase kase = ProductCase::Equal;
  bool swapped = false;
  std::vector<int> non_neighborly_g;  // isolated skeleton vertices of the smaller factor
  bool skeleton_g_connected = false;
  bool skeleton_h_connected = false;
  bool conditions_met = false;
  ProductVerdict accounting_verdict = ProductVerdict::Inconclusive;
  bool contradiction = false;  // accounting verdict inconsistent with the ladder
};

/// Necessary-condition ladder: skeleton isolation in the less-than case,
/// skeleton connectivity in the equal case, cross-checked against
/// rank_accounting.
NecessaryReport necessary_conditions(const Graph& g, const Graph& h, const SolveParams& params = {});

struct ProductDependency {
  int vertex_flat = 0;                  // product vertex (i,l)
  std::map<int, double> coefficients;   // flat product vertex -> conical weight
  double residual = 0.0;
};

/// Combines factor dependencies i -> j and l -> k into a dependency for the
/// balanced direct-sum coloring, with coefficients alpha_j' beta_k' / (t-1).
/// Factor witnesses must be in conical form with coefficient sum t-1.
ProductDependency build_product_dependency(const NeighborlinessWitness& witness_g,
                                           const NeighborlinessWitness& witness_h,
                                           const VectorColoring& vc_g, const VectorColoring& vc_h,
                                           double t);

}  // namespace vclab
