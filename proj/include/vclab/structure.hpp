#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "vclab/coloring.hpp"
#include "vclab/graph.hpp"

namespace vclab {

/// Convex dependency witnessing neighborliness of a vertex: coefficients over
/// the closed tight neighborhood summing to 1, with positive weight on the
/// vertex itself.
struct NeighborlinessWitness {
  int vertex = -1;
  std::map<int, double> coefficients;
  double residual = 0.0;
};

/// Decides -p_i in cone({p_j : j tight neighbor of i}) on a max-rank coloring;
/// by the max-rank transfer property the verdict holds for every optimal
/// coloring. Returns nothing when the cone membership is infeasible.
std::optional<NeighborlinessWitness> is_neighborly(const VectorColoring& vc, const Graph& g, int vertex,
                                                   double tol);

/// Arrow set D(i): tight neighbors j that receive positive weight in some
/// dependency, decided per target by a small LP maximizing that weight.
/// Requires a neighborly vertex.
std::set<int> arrow_set(const VectorColoring& vc, const Graph& g, int vertex, double tol);

/// Nonzero perturbation direction in the R-matrix characterization of the
/// optimal set: p_i'Rp_i = 0 everywhere, p_i'Rp_j <= 0 on tight edges.
struct RPerturbation {
  Matrix r;  // d x d symmetric, Frobenius-normalized
  double equality_residual = 0.0;
  std::map<Edge, double> tight_edge_values;
  double epsilon_max = 0.0;
};

struct UvcResult {
  bool unique = false;
  std::optional<RPerturbation> certificate;
  bool via_kernel = false;  // set when the equality-kernel stage decided
  bool marginal = false;    // a deciding quantity sat within 10x of tolerance
  double decision_tol = 0.0;
};

/// Unique vector colorability via the two-stage R-matrix test: (1) kernel of
/// the equality system on diagonal + tight edges, (2) per tight edge an LP
/// driving that entry negative under the cone constraints with entries boxed
/// in [-1, 1].
UvcResult uvc_check(const ChiResult& chi, const Graph& g, const SolveParams& params = {});
UvcResult uvc_check(const Graph& g, const SolveParams& params = {});

/// Distinct optimal coloring built from a nonzero perturbation, with the
/// scaling chosen from the PSD bound and the slack-edge budgets.
VectorColoring second_coloring(const VectorColoring& vc, const Graph& g, const RPerturbation& r,
                               const SolveParams& params = {});

}  // namespace vclab
