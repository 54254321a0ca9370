#include "vclab/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vclab {

namespace {

constexpr double kSupportTol = 1e-8;

SolveConfig to_solve_config(const SolveParams& params) {
  SolveConfig cfg;
  cfg.tol = params.solve_tol;
  cfg.max_iterations = params.max_iterations;
  return cfg;
}

double active_deviation(const Matrix& m, double t, const std::vector<Edge>& tight) {
  double deviation = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    deviation = std::max(deviation, std::abs(m(i, i) - (t - 1.0)));
  for (auto [i, j] : tight) deviation = std::max(deviation, std::abs(m(i, j) + 1.0));
  return deviation;
}

// Polishes a near-optimal Gram matrix onto the optimal face. Witness residuals
// are quadratic forms of M, so solver noise eps in the active entries turns
// into sqrt(eps)-sized vector residuals unless the point is repaired first.
//
// The active constraints (diagonal t-1, tight edges -1) form an
// underdetermined quadratic system in the factor matrix; minimum-norm
// Gauss-Newton steps converge quadratically, and the refactored Gram is then
// an exact face point: PSD of the same rank with machine-exact active
// entries.
struct PolishResult {
  Matrix gram;
  double t = 1.0;
};

// Damped Gauss-Newton driver shared by the polish stages: residual and
// Jacobian callbacks over a flat unknown vector, Levenberg-Marquardt ridge.
template <typename ResidualFn, typename JacobianFn>
Vector levenberg_refine(Vector x, const ResidualFn& residual, const JacobianFn& jacobian, int max_steps) {
  Vector f = residual(x);
  double ridge = 1e-11;
  for (int step = 0; step < max_steps && f.norm() > 1e-14; ++step) {
    Matrix jac = jacobian(x);
    Matrix gram_base = jac * jac.transpose();
    double scale = std::max(1.0, gram_base.trace() / static_cast<double>(jac.rows()));
    bool improved = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Matrix gram_j = gram_base;
      gram_j.diagonal().array() += ridge * scale;
      Vector delta = jac.transpose() * Eigen::LDLT<Matrix>(gram_j).solve(-f);
      Vector x_next = x + delta;
      Vector f_next = residual(x_next);
      if (f_next.norm() < f.norm()) {
        x = x_next;
        f = f_next;
        ridge = std::max(ridge / 10.0, 1e-13);
        improved = true;
        break;
      }
      ridge *= 100.0;
    }
    if (!improved) break;
  }
  return x;
}

// Polishes the solved pair onto the optimal face. Stage one refines (P, t)
// against the active entries plus the complementary-slackness rows B P = 0;
// stage two, on small instances, refines the dual factor jointly so residuals
// reach machine precision: for unknowns (P, t, Q) satisfying the active
// entries, P'Q = 0, tr(QQ') = 1, and the structural zeros of QQ', the
// slackness identity forces t = sum(QQ') and the pair is exactly optimal.
PolishResult polish_to_face(const Matrix& m_in, double t_in, const std::vector<Edge>& tight, int rank,
                            double rank_tol, const Matrix& dual_b, const Graph& g) {
  const int n = static_cast<int>(m_in.rows());
  if (rank <= 0) return {Matrix::Zero(n, n), 1.0};
  Matrix p0 = gram_to_vectors(m_in, rank_tol);
  const int d = static_cast<int>(p0.cols());

  std::vector<int> b_support;
  for (int i = 0; i < n; ++i)
    if (dual_b(i, i) > kSupportTol) b_support.push_back(i);
  const int rows_active = n + static_cast<int>(tight.size());

  auto pack = [&](const Matrix& p, double t) {
    Vector x(n * d + 1);
    for (int i = 0; i < n; ++i) x.segment(i * d, d) = p.row(i).transpose();
    x[n * d] = t;
    return x;
  };
  auto unpack_p = [&](const Vector& x) {
    Matrix p(n, d);
    for (int i = 0; i < n; ++i) p.row(i) = x.segment(i * d, d).transpose();
    return p;
  };

  {
    const int rows = rows_active + static_cast<int>(b_support.size()) * d;
    auto residual = [&](const Vector& x) {
      Matrix q = unpack_p(x);
      double tv = x[n * d];
      Vector f(rows);
      for (int i = 0; i < n; ++i) f[i] = q.row(i).squaredNorm() - (tv - 1.0);
      for (size_t e = 0; e < tight.size(); ++e)
        f[n + static_cast<int>(e)] = q.row(tight[e].first).dot(q.row(tight[e].second)) + 1.0;
      int at = rows_active;
      for (int i : b_support) {
        Vector combo = Vector::Zero(d);
        for (int j = 0; j < n; ++j)
          if (dual_b(i, j) != 0.0) combo += dual_b(i, j) * q.row(j).transpose();
        f.segment(at, d) = combo;
        at += d;
      }
      return f;
    };
    auto jacobian = [&](const Vector& x) {
      Matrix q = unpack_p(x);
      Matrix jac = Matrix::Zero(rows, n * d + 1);
      for (int i = 0; i < n; ++i) {
        jac.row(i).segment(i * d, d) = 2.0 * q.row(i);
        jac(i, n * d) = -1.0;
      }
      for (size_t e = 0; e < tight.size(); ++e) {
        auto [i, j] = tight[e];
        jac.row(n + static_cast<int>(e)).segment(i * d, d) = q.row(j);
        jac.row(n + static_cast<int>(e)).segment(j * d, d) = q.row(i);
      }
      int at = rows_active;
      for (int i : b_support) {
        for (int j = 0; j < n; ++j)
          if (dual_b(i, j) != 0.0)
            for (int c = 0; c < d; ++c) jac(at + c, j * d + c) = dual_b(i, j);
        at += d;
      }
      return jac;
    };
    Vector x = levenberg_refine(pack(p0, t_in), residual, jacobian, 12);
    p0 = unpack_p(x);
  }
  double t = 0.0;
  for (int i = 0; i < n; ++i) t += p0.row(i).squaredNorm();
  t = t / n + 1.0;

  const int r = numeric_rank(dual_b, rank_tol);
  if (n <= 40 && r > 0) {
    auto b_dec = eig_sym(dual_b);
    Matrix q0(n, r);
    for (int c = 0; c < r; ++c)
      q0.col(c) = b_dec.eigenvectors.col(c) * std::sqrt(std::max(b_dec.eigenvalues[c], 0.0));
    std::vector<Edge> zero_pairs;  // slack edges and non-adjacent pairs
    std::set<Edge> tight_set(tight.begin(), tight.end());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!tight_set.count({i, j})) zero_pairs.push_back({i, j});
    const int rows = rows_active + d * r + 1 + static_cast<int>(zero_pairs.size());
    const int np = n * d;
    auto unpack_q = [&](const Vector& x) {
      Matrix q(n, r);
      for (int i = 0; i < n; ++i) q.row(i) = x.segment(np + 1 + i * r, r).transpose();
      return q;
    };
    auto residual = [&](const Vector& x) {
      Matrix pp = unpack_p(x);
      Matrix qq = unpack_q(x);
      double tv = x[np];
      Vector f(rows);
      for (int i = 0; i < n; ++i) f[i] = pp.row(i).squaredNorm() - (tv - 1.0);
      for (size_t e = 0; e < tight.size(); ++e)
        f[n + static_cast<int>(e)] = pp.row(tight[e].first).dot(pp.row(tight[e].second)) + 1.0;
      Matrix orth = pp.transpose() * qq;  // d x r
      int at = rows_active;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < r; ++b) f[at++] = orth(a, b);
      f[at++] = qq.squaredNorm() - 1.0;
      for (auto [i, j] : zero_pairs) f[at++] = qq.row(i).dot(qq.row(j));
      return f;
    };
    auto jacobian = [&](const Vector& x) {
      Matrix pp = unpack_p(x);
      Matrix qq = unpack_q(x);
      Matrix jac = Matrix::Zero(rows, np + 1 + n * r);
      for (int i = 0; i < n; ++i) {
        jac.row(i).segment(i * d, d) = 2.0 * pp.row(i);
        jac(i, np) = -1.0;
      }
      for (size_t e = 0; e < tight.size(); ++e) {
        auto [i, j] = tight[e];
        jac.row(n + static_cast<int>(e)).segment(i * d, d) = pp.row(j);
        jac.row(n + static_cast<int>(e)).segment(j * d, d) = pp.row(i);
      }
      int at = rows_active;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < r; ++b) {
          for (int i = 0; i < n; ++i) {
            jac(at, i * d + a) = qq(i, b);
            jac(at, np + 1 + i * r + b) = pp(i, a);
          }
          ++at;
        }
      for (int i = 0; i < n; ++i) jac.row(at).segment(np + 1 + i * r, r) = 2.0 * qq.row(i);
      ++at;
      for (auto [i, j] : zero_pairs) {
        jac.row(at).segment(np + 1 + i * r, r) = qq.row(j);
        jac.row(at).segment(np + 1 + j * r, r) = qq.row(i);
        ++at;
      }
      return jac;
    };
    Vector x0(np + 1 + n * r);
    x0.head(np) = pack(p0, t).head(np);
    x0[np] = t;
    for (int i = 0; i < n; ++i) x0.segment(np + 1 + i * r, r) = q0.row(i).transpose();
    Vector x = levenberg_refine(x0, residual, jacobian, 12);
    p0 = unpack_p(x);
    t = x[np];
  }

  Matrix polished = symmetrize(p0 * p0.transpose());
  if (active_deviation(polished, t, tight) <= std::max(active_deviation(m_in, t_in, tight), 1e-8))
    return {polished, t};
  return {m_in, t_in};
}

}  // namespace

VectorColoring make_vector_coloring(const Matrix& gram, double t, const Graph& g,
                                    const SolveParams& params) {
  VectorColoring vc;
  vc.t = t;
  vc.gram = symmetrize(gram);
  vc.factors = gram_to_vectors(vc.gram, params.rank_tol);
  vc.tight_edges = tight_edges(vc, g, params.tight_tol);
  return vc;
}

DualWitness make_dual_witness(const Matrix& b, int n, double rank_tol) {
  DualWitness dw;
  dw.b = symmetrize(b);
  std::vector<Edge> support_edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(dw.b(i, j)) > kSupportTol) support_edges.push_back({i, j});
  dw.support = Graph(n, support_edges);
  dw.corank = n - numeric_rank(dw.b, rank_tol);
  dw.positive_diagonal = dw.b.diagonal().minCoeff() > kSupportTol;
  dw.connected = is_connected(dw.support);
  return dw;
}

ChiResult chi_v(const Graph& g, const SolveParams& params) {
  const int n = g.vertex_count();
  if (n < 1) throw std::invalid_argument("chi_v: graph has no vertices");
  ChiResult out;
  if (n == 1) {
    out.t = 1.0;
    out.coloring = make_vector_coloring(Matrix::Zero(1, 1), 1.0, g, params);
    out.witness = make_dual_witness(Matrix::Ones(1, 1), 1, params.rank_tol);
    out.dual_value = 1.0;
    return out;
  }
  auto solution = solve(vc_primal_problem(g), to_solve_config(params));
  if (!solution.ok()) throw std::runtime_error("chi_v: solver failure: " + solution.message);
  auto [gram, t] = vc_primal_extract(solution, g);
  out.witness = make_dual_witness(vc_dual_extract(solution, g), n, params.rank_tol);
  {
    VectorColoring raw;
    raw.gram = gram;
    std::vector<Edge> tight = tight_edges(raw, g, params.tight_tol);
    int rank = numeric_rank(gram, params.rank_tol);
    auto polished = polish_to_face(gram, t, tight, rank, params.rank_tol, out.witness.b, g);
    gram = polished.gram;
    t = polished.t;
  }
  out.t = t;
  out.coloring = make_vector_coloring(gram, t, g, params);
  out.iterations = solution.iterations;
  out.gap = solution.gap;
  out.primal_residual = solution.primal_residual;
  out.dual_residual = solution.dual_residual;
  out.dual_value = solution.dual_objective;
  return out;
}

StrictChiResult chi_sv(const Graph& g, const SolveParams& params) {
  const int n = g.vertex_count();
  if (n < 1) throw std::invalid_argument("chi_sv: graph has no vertices");
  if (n == 1) return {1.0, 0, 0.0};
  auto solution = solve(svc_primal_problem(g), to_solve_config(params));
  if (!solution.ok()) throw std::runtime_error("chi_sv: solver failure: " + solution.message);
  return {solution.primal_objective, solution.iterations, solution.gap};
}

Matrix gram_to_vectors(const Matrix& m, double tol) {
  auto dec = eig_sym(symmetrize(m));
  const Eigen::Index n = m.rows();
  double top = n ? dec.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  double thr = tol * std::max(1.0, top);
  if (n && dec.eigenvalues[n - 1] < -thr)
    throw std::invalid_argument("gram_to_vectors: matrix indefinite beyond tolerance");
  int d = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(dec.eigenvalues[i]) > thr) ++d;
  Matrix p(n, d);
  for (int c = 0; c < d; ++c)
    p.col(c) = dec.eigenvectors.col(c) * std::sqrt(std::max(dec.eigenvalues[c], 0.0));
  return p;
}

std::vector<Edge> tight_edges(const VectorColoring& vc, const Graph& g, double tol) {
  std::vector<Edge> out;
  for (auto [i, j] : g.edges())
    if (std::abs(vc.gram(i, j) + 1.0) <= tol) out.push_back({i, j});
  return out;
}

SkeletonResult skeleton(const ChiResult& chi, const Graph& g, double tight_tol) {
  VectorColoring vc = chi.coloring;
  SkeletonResult out;
  out.graph = Graph(g.vertex_count(), tight_edges(vc, g, tight_tol));
  out.dual_support_contained = true;
  for (auto [i, j] : chi.witness.support.edges())
    if (!out.graph.adjacent(i, j)) out.dual_support_contained = false;
  return out;
}

SkeletonResult skeleton(const Graph& g, const SolveParams& params) {
  return skeleton(chi_v(g, params), g, params.tight_tol);
}

SlacknessReport complementary_slackness(const VectorColoring& vc, const DualWitness& dw, const Graph& g) {
  SlacknessReport report;
  const Matrix& m = vc.gram;
  const Matrix& b = dw.b;
  report.mb_norm = (m * b).norm();
  double edge_sum = 0.0;
  for (auto [i, j] : g.edges()) {
    double prod = (m(i, j) + 1.0) * b(i, j);
    report.max_edge_product = std::max(report.max_edge_product, std::abs(prod));
    edge_sum += 2.0 * prod;  // ordered adjacent pairs
  }
  double s = b.sum();
  report.trace_direct = m.cwiseProduct(b).sum();
  report.trace_identity = (vc.t - s) + edge_sum;
  report.identity_error = std::abs(report.trace_direct - report.trace_identity);
  return report;
}

StrictComplementarityReport strict_complementarity(const VectorColoring& vc, const DualWitness& dw,
                                                   double tol) {
  StrictComplementarityReport report;
  report.rank_primal = numeric_rank(vc.gram, tol);
  report.rank_dual = numeric_rank(dw.b, tol);
  report.verdict = report.rank_primal + report.rank_dual == vc.gram.rows();
  return report;
}

namespace {

// Entrywise-nonnegative unit top eigenvector of a nonnegative matrix, built
// per connected component of its support and mixed equally across components
// that attain the top eigenvalue.
Vector nonneg_top_eigenvector(const Matrix& a, double lambda_max) {
  const int n = static_cast<int>(a.rows());
  std::vector<Edge> support;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(a(i, j)) > 0.0) support.push_back({i, j});
  Graph ga(n, support);
  auto comps = connected_components(ga);
  Vector u = Vector::Zero(n);
  int hits = 0;
  for (const auto& comp : comps) {
    Matrix sub(comp.size(), comp.size());
    for (size_t r = 0; r < comp.size(); ++r)
      for (size_t c = 0; c < comp.size(); ++c) sub(r, c) = a(comp[r], comp[c]);
    auto dec = eig_sym(sub);
    if (dec.eigenvalues[0] < lambda_max - 1e-9 * std::max(1.0, std::abs(lambda_max))) continue;
    Vector v = dec.eigenvectors.col(0);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) v = -v;
    v = v.cwiseMax(0.0);
    v.normalize();
    for (size_t r = 0; r < comp.size(); ++r) u[comp[r]] += v[static_cast<Eigen::Index>(r)];
    ++hits;
  }
  if (hits == 0) throw std::runtime_error("nonneg_top_eigenvector: no component attains the top eigenvalue");
  u.normalize();
  return u;
}

}  // namespace

AForm b_to_a(const DualWitness& dw) {
  const Matrix& b = dw.b;
  const int n = static_cast<int>(b.rows());
  std::vector<int> support;
  for (int i = 0; i < n; ++i)
    if (b(i, i) > kSupportTol) support.push_back(i);
  for (int i = 0; i < n; ++i) {
    if (b(i, i) > kSupportTol) continue;
    if (b(i, i) < -1e-7) throw std::invalid_argument("b_to_a: negative diagonal entry");
    for (int j = 0; j < n; ++j)
      if (j != i && std::abs(b(i, j)) > 1e-6)
        throw std::invalid_argument("b_to_a: off-diagonal mass on a zero-diagonal row");
  }
  Matrix a = Matrix::Zero(n, n);
  for (size_t r = 0; r < support.size(); ++r)
    for (size_t c = 0; c < support.size(); ++c) {
      int i = support[r], j = support[c];
      double v = b(i, j) / std::sqrt(b(i, i) * b(j, j));
      a(i, j) = i == j ? 0.0 : v;
    }
  AForm af;
  af.a = symmetrize(a);
  auto dec = eig_sym(af.a);
  af.lambda_max = dec.eigenvalues[0];
  af.lambda_min = dec.eigenvalues[n - 1];
  af.perron = nonneg_top_eigenvector(af.a, af.lambda_max);
  return af;
}

DualWitness a_to_b(const AForm& af, const Graph& g, double rank_tol) {
  const int n = static_cast<int>(af.a.rows());
  if (g.vertex_count() != n) throw std::invalid_argument("a_to_b: size mismatch");
  const Vector& u = af.perron;
  Matrix b = af.a;
  b.diagonal().array() += 1.0;
  b = b.cwiseProduct(u * u.transpose());
  return make_dual_witness(b, n, rank_tol);
}

ChiResult closed_form_1wr(const Graph& g, const SolveParams& params) {
  const int n = g.vertex_count();
  if (n < 1 || !g.has_edges()) throw std::invalid_argument("closed_form_1wr: graph must be nonempty");
  int d = g.degree(0);
  for (int v = 1; v < n; ++v)
    if (g.degree(v) != d) throw std::invalid_argument("closed_form_1wr: graph is not regular");
  if (!is_one_walk_regular(g)) throw std::invalid_argument("closed_form_1wr: graph is not 1-walk-regular");

  Matrix adj = g.adjacency_matrix();
  auto dec = eig_sym(adj);
  double tau = dec.eigenvalues[n - 1];
  if (tau >= 0) throw std::invalid_argument("closed_form_1wr: least eigenvalue must be negative");
  double t = 1.0 - d / tau;

  // tau-eigenprojector, grouping eigenvalues within 1e-7 of tau.
  Matrix e_tau = Matrix::Zero(n, n);
  int mult = 0;
  for (int k = 0; k < n; ++k)
    if (std::abs(dec.eigenvalues[k] - tau) <= 1e-7) {
      e_tau.noalias() += dec.eigenvectors.col(k) * dec.eigenvectors.col(k).transpose();
      ++mult;
    }
  Matrix m = (t - 1.0) * (static_cast<double>(n) / mult) * e_tau;
  Matrix b = (adj - tau * Matrix::Identity(n, n)) / (-n * tau);

  ChiResult out;
  out.t = t;
  out.coloring = make_vector_coloring(m, t, g, params);
  out.witness = make_dual_witness(b, n, params.rank_tol);
  out.dual_value = b.sum();
  return out;
}

double eigenvalue_bound(const Graph& g, const Matrix& w) {
  const int n = g.vertex_count();
  if (w.rows() != n || w.cols() != n) throw std::invalid_argument("eigenvalue_bound: size mismatch");
  double mass = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j && g.adjacent(i, j)) {
        if (w(i, j) < -1e-12) throw std::invalid_argument("eigenvalue_bound: negative entry");
        mass += std::abs(w(i, j));
      } else if (std::abs(w(i, j)) > 1e-12) {
        throw std::invalid_argument("eigenvalue_bound: support off the edge set");
      }
    }
  if (mass <= 0) throw std::invalid_argument("eigenvalue_bound: zero matrix");
  auto dec = eig_sym(symmetrize(w));
  double lo = dec.eigenvalues[n - 1];
  if (lo >= -1e-12) throw std::invalid_argument("eigenvalue_bound: least eigenvalue not negative");
  return 1.0 - dec.eigenvalues[0] / lo;
}

}  // namespace vclab
