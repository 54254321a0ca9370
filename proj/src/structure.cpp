#include "vclab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vclab {

namespace {

std::vector<int> tight_neighbors(const VectorColoring& vc, int vertex) {
  std::vector<int> out;
  for (auto [i, j] : vc.tight_edges) {
    if (i == vertex) out.push_back(j);
    if (j == vertex) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Symmetric d x d matrices as vectors over the upper-triangle basis.
int sym_dim(int d) { return d * (d + 1) / 2; }

// Row of the linear functional R -> p_i' R p_j in upper-triangle coordinates.
Vector pair_row(const Matrix& factors, int i, int j) {
  const int d = static_cast<int>(factors.cols());
  Vector row(sym_dim(d));
  int idx = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      row[idx++] = a == b ? factors(i, a) * factors(j, a)
                          : factors(i, a) * factors(j, b) + factors(i, b) * factors(j, a);
    }
  return row;
}

Matrix unpack_sym(const Vector& coords, int d) {
  Matrix r(d, d);
  int idx = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      r(a, b) = coords[idx];
      r(b, a) = coords[idx];
      ++idx;
    }
  return r;
}

double epsilon_budget(const VectorColoring& vc, const Graph& g, const Matrix& r) {
  const Matrix& p = vc.factors;
  double eps = 1.0;
  auto dec = eig_sym(r);
  double lo = dec.eigenvalues[dec.eigenvalues.size() - 1];
  if (lo < -1e-12) eps = std::min(eps, 1.0 / -lo);
  std::set<Edge> tight(vc.tight_edges.begin(), vc.tight_edges.end());
  for (auto e : g.edges()) {
    if (tight.count(e)) continue;
    double value = p.row(e.first) * r * p.row(e.second).transpose();
    double budget = -1.0 - vc.gram(e.first, e.second);  // strictly positive on slack edges
    if (value > 1e-12 && budget > 0) eps = std::min(eps, budget / value);
  }
  return eps;
}

RPerturbation make_perturbation(const VectorColoring& vc, const Graph& g, const Matrix& r_raw) {
  RPerturbation rp;
  rp.r = symmetrize(r_raw) / r_raw.norm();
  const Matrix& p = vc.factors;
  for (int i = 0; i < g.vertex_count(); ++i)
    rp.equality_residual = std::max(rp.equality_residual,
                                    std::abs(double(p.row(i) * rp.r * p.row(i).transpose())));
  for (auto [i, j] : vc.tight_edges)
    rp.tight_edge_values[{i, j}] = p.row(i) * rp.r * p.row(j).transpose();
  rp.epsilon_max = epsilon_budget(vc, g, rp.r);
  return rp;
}

}  // namespace

std::optional<NeighborlinessWitness> is_neighborly(const VectorColoring& vc, const Graph& g, int vertex,
                                                   double tol) {
  if (vertex < 0 || vertex >= g.vertex_count()) throw std::out_of_range("is_neighborly: vertex index");
  auto nbrs = tight_neighbors(vc, vertex);
  Vector target = -vc.factors.row(vertex).transpose();
  std::vector<Vector> generators;
  generators.reserve(nbrs.size());
  for (int j : nbrs) generators.push_back(vc.factors.row(j).transpose());
  auto fit = nnls_membership(target, generators, tol);
  if (!fit.feasible) return std::nullopt;

  NeighborlinessWitness w;
  w.vertex = vertex;
  double denom = 1.0 + fit.coefficients.sum();
  w.coefficients[vertex] = 1.0 / denom;
  for (size_t k = 0; k < nbrs.size(); ++k)
    w.coefficients[nbrs[k]] += fit.coefficients[static_cast<Eigen::Index>(k)] / denom;
  Vector combo = Vector::Zero(vc.factors.cols());
  for (auto [j, c] : w.coefficients) combo += c * vc.factors.row(j).transpose();
  w.residual = combo.norm();
  return w;
}

std::set<int> arrow_set(const VectorColoring& vc, const Graph& g, int vertex, double tol) {
  auto witness = is_neighborly(vc, g, vertex, tol);
  if (!witness) throw std::invalid_argument("arrow_set: vertex is not neighborly");
  auto nbrs = tight_neighbors(vc, vertex);
  const int k = static_cast<int>(nbrs.size());
  const int d = static_cast<int>(vc.factors.cols());

  // One LP per candidate target: maximize its coefficient over all conical
  // dependencies; a single witness can have zero weight that another makes
  // positive.
  LinearProgram lp;
  lp.eq_lhs = Matrix(d, k);
  for (int c = 0; c < k; ++c) lp.eq_lhs.col(c) = vc.factors.row(nbrs[c]).transpose();
  lp.eq_rhs = -vc.factors.row(vertex).transpose();
  lp.lower = Vector::Zero(k);
  lp.upper = Vector::Constant(k, vc.t + 1.0);  // coefficients sum to t-1

  std::set<int> arrows;
  for (int c = 0; c < k; ++c) {
    lp.objective = Vector::Zero(k);
    lp.objective[c] = -1.0;  // maximize
    auto res = lp_solve(lp);
    if (res.status == LpResult::Status::Optimal && res.x[c] > tol) arrows.insert(nbrs[c]);
  }
  return arrows;
}

UvcResult uvc_check(const ChiResult& chi, const Graph& g, const SolveParams& params) {
  const VectorColoring& vc = chi.coloring;
  const Matrix& p = vc.factors;
  const int n = g.vertex_count();
  const int d = static_cast<int>(p.cols());
  const int dim = sym_dim(d);
  UvcResult out;
  out.decision_tol = params.rank_tol;
  if (d == 0) {
    out.unique = true;  // empty graph: the zero Gram matrix is the only optimum
    return out;
  }

  // Stage 1: kernel of the equality system over diagonal and tight edges.
  const auto& tight = vc.tight_edges;
  Matrix rows(n + static_cast<int>(tight.size()), dim);
  for (int i = 0; i < n; ++i) rows.row(i) = pair_row(p, i, i).transpose();
  for (size_t e = 0; e < tight.size(); ++e)
    rows.row(n + static_cast<int>(e)) = pair_row(p, tight[e].first, tight[e].second).transpose();
  Matrix gram = rows.transpose() * rows;
  auto dec = eig_sym(gram);
  double top = std::max(1.0, dec.eigenvalues.cwiseAbs().maxCoeff());
  double thr = params.rank_tol * top;
  for (int k_idx = dim - 1; k_idx >= 0; --k_idx) {
    if (std::abs(dec.eigenvalues[k_idx]) > thr) break;
    Matrix r = unpack_sym(dec.eigenvectors.col(k_idx), d);
    auto cand = make_perturbation(vc, g, r);
    double tight_violation = 0.0;
    for (auto& [e, v] : cand.tight_edge_values) tight_violation = std::max(tight_violation, std::abs(v));
    if (cand.equality_residual <= 1e-7 && tight_violation <= 1e-7) {
      out.unique = false;
      out.via_kernel = true;
      out.certificate = cand;
      return out;
    }
    out.marginal = true;  // kernel-level eigenvalue whose direction failed validation
  }
  for (int k_idx = 0; k_idx < dim; ++k_idx) {
    double lam = std::abs(dec.eigenvalues[k_idx]);
    if (lam > thr && lam < 10.0 * thr) out.marginal = true;
  }

  // Stage 2: per tight edge, drive the entry negative inside the cone.
  LinearProgram lp;
  lp.eq_lhs = rows.topRows(n);
  lp.eq_rhs = Vector::Zero(n);
  lp.ineq_lhs = rows.bottomRows(static_cast<int>(tight.size()));
  lp.ineq_rhs = Vector::Zero(static_cast<int>(tight.size()));
  lp.lower = Vector::Constant(dim, -1.0);
  lp.upper = Vector::Constant(dim, 1.0);
  const double negative_tol = 1e-6;
  for (size_t e = 0; e < tight.size(); ++e) {
    lp.objective = rows.row(n + static_cast<int>(e)).transpose();
    auto res = lp_solve(lp);
    if (res.status != LpResult::Status::Optimal) continue;
    if (res.value < -negative_tol) {
      Matrix r = unpack_sym(res.x, d);
      out.unique = false;
      out.via_kernel = false;
      out.certificate = make_perturbation(vc, g, r);
      return out;
    }
    if (res.value < -negative_tol / 10.0) out.marginal = true;
  }
  out.unique = true;
  return out;
}

UvcResult uvc_check(const Graph& g, const SolveParams& params) {
  if (g.vertex_count() < 1) throw std::invalid_argument("uvc_check: graph has no vertices");
  return uvc_check(chi_v(g, params), g, params);
}

VectorColoring second_coloring(const VectorColoring& vc, const Graph& g, const RPerturbation& r,
                               const SolveParams& params) {
  if (r.r.size() == 0 || r.r.norm() < 1e-12) throw std::invalid_argument("second_coloring: zero perturbation");
  const Matrix& p = vc.factors;
  double eps = std::min(r.epsilon_max, epsilon_budget(vc, g, r.r));
  const Matrix identity = Matrix::Identity(p.cols(), p.cols());
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (eps < 1e-12) break;
    Matrix gram = p * (identity + eps * r.r) * p.transpose();
    bool ok = cholesky_psd(gram, 1e-7).ok;
    for (int i = 0; ok && i < g.vertex_count(); ++i)
      if (std::abs(gram(i, i) - (vc.t - 1.0)) > 1e-6) ok = false;
    if (ok)
      for (auto [i, j] : g.edges())
        if (gram(i, j) > -1.0 + 1e-6) {
          ok = false;
          break;
        }
    if (ok && (gram - vc.gram).norm() > 1e-6) return make_vector_coloring(gram, vc.t, g, params);
    eps *= 0.5;
  }
  throw std::runtime_error("second_coloring: scaling collapsed before a feasible distinct Gram was found");
}

}  // namespace vclab
