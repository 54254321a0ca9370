#include "vclab/product.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vclab {

namespace {

Matrix ones(int r, int c) { return Matrix::Ones(r, c); }

struct FlatIndex {
  int n_h;
  int operator()(int i, int l) const { return i * n_h + l; }
};

}  // namespace

VectorColoring induced_coloring(const VectorColoring& vc_g, const Graph& g, const Graph& h,
                                const SolveParams& params) {
  const int n_g = g.vertex_count();
  const int n_h = h.vertex_count();
  Graph product = categorical_product(g, h);
  if (!h.has_edges()) {
    // Footnote case: the product is empty, so the only optimal coloring is the
    // zero one; an induced construction cannot realize it when G is nonempty.
    return make_vector_coloring(Matrix::Zero(n_g * n_h, n_g * n_h), 1.0, product, params);
  }
  Matrix gram = kron(vc_g.gram, ones(n_h, n_h));
  return make_vector_coloring(gram, vc_g.t, product, params);
}

VectorColoring direct_sum(const VectorColoring& vc_g, const VectorColoring& vc_h, const Graph& g,
                          const Graph& h, double alpha, const SolveParams& params) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("direct_sum: alpha outside [0,1]");
  if (std::abs(vc_g.t - vc_h.t) > 1e-6)
    throw std::invalid_argument("direct_sum: factor coloring values differ");
  const int n_g = g.vertex_count();
  const int n_h = h.vertex_count();
  Graph product = categorical_product(g, h);
  Matrix gram = alpha * kron(vc_g.gram, ones(n_h, n_h)) + (1.0 - alpha) * kron(ones(n_g, n_g), vc_h.gram);
  return make_vector_coloring(gram, vc_g.t, product, params);
}

bool is_induced_by_g(const Matrix& gram, int n_g, int n_h, double tol) {
  for (int i = 0; i < n_g; ++i)
    for (int j = 0; j < n_g; ++j) {
      double lo = gram(i * n_h, j * n_h), hi = lo;
      for (int l = 0; l < n_h; ++l)
        for (int k = 0; k < n_h; ++k) {
          double v = gram(i * n_h + l, j * n_h + k);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      if (hi - lo > tol) return false;
    }
  return true;
}

bool is_induced_by_h(const Matrix& gram, int n_g, int n_h, double tol) {
  for (int l = 0; l < n_h; ++l)
    for (int k = 0; k < n_h; ++k) {
      double lo = gram(l, k), hi = lo;
      for (int i = 0; i < n_g; ++i)
        for (int j = 0; j < n_g; ++j) {
          double v = gram(i * n_h + l, j * n_h + k);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      if (hi - lo > tol) return false;
    }
  return true;
}

HedetniemiReport verify_hedetniemi(const Graph& g, const Graph& h, const SolveParams& params,
                                   bool include_strict) {
  HedetniemiReport report;
  auto chi_g = chi_v(g, params);
  auto chi_h = chi_v(h, params);
  Graph product = categorical_product(g, h);
  auto chi_p = chi_v(product, params);
  report.chi_g = chi_g.t;
  report.chi_h = chi_h.t;
  report.chi_product = chi_p.t;
  report.min_value = std::min(chi_g.t, chi_h.t);
  report.identity_error = std::abs(chi_p.t - report.min_value);
  report.identity_ok = report.identity_error <= 1e-5;

  if (g.has_edges() && h.has_edges()) {
    AForm af_g = b_to_a(chi_g.witness);
    AForm af_h = b_to_a(chi_h.witness);
    double denom = std::max(af_g.lambda_max, af_h.lambda_max);
    Matrix a = kron(af_g.a, af_h.a) / denom;
    auto dec = eig_sym(a);
    report.certificate_built = true;
    report.certificate_lambda_min = dec.eigenvalues[dec.eigenvalues.size() - 1];
    report.certificate_value = 1.0 + dec.eigenvalues[0];
    report.certificate_error = std::max(std::abs(report.certificate_lambda_min + 1.0),
                                        std::abs(report.certificate_value - report.min_value));
    report.certificate_ok = report.certificate_error <= 1e-6;
  }

  if (include_strict) {
    report.strict_checked = true;
    report.strict_g = chi_sv(g, params).t;
    report.strict_h = chi_sv(h, params).t;
    report.strict_product = chi_sv(product, params).t;
    report.strict_error = std::abs(report.strict_product - std::min(report.strict_g, report.strict_h));
    report.strict_ok = report.strict_error <= 1e-5;
  }

  report.pass = report.identity_ok && (!report.certificate_built || report.certificate_ok) &&
                (!report.strict_checked || report.strict_ok);
  return report;
}

namespace {

double min_eig(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

std::optional<ConvexDecomposition> convex_decompose(const Matrix& gram, const Graph& g, const Graph& h,
                                                    double t, double tol) {
  const int n_g = g.vertex_count();
  const int n_h = h.vertex_count();
  FlatIndex at{n_h};
  if (gram.rows() != n_g * n_h) throw std::invalid_argument("convex_decompose: size mismatch");

  Matrix rowmean = Matrix::Zero(n_g, n_g);
  Matrix colmean = Matrix::Zero(n_h, n_h);
  for (int i = 0; i < n_g; ++i)
    for (int j = 0; j < n_g; ++j) {
      double sum = 0.0;
      for (int l = 0; l < n_h; ++l)
        for (int k = 0; k < n_h; ++k) sum += gram(at(i, l), at(j, k));
      rowmean(i, j) = sum / (static_cast<double>(n_h) * n_h);
    }
  for (int l = 0; l < n_h; ++l)
    for (int k = 0; k < n_h; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n_g; ++i)
        for (int j = 0; j < n_g; ++j) sum += gram(at(i, l), at(j, k));
      colmean(l, k) = sum / (static_cast<double>(n_g) * n_g);
    }
  double grand = rowmean.mean();

  double fit_residual = 0.0;
  for (int i = 0; i < n_g; ++i)
    for (int j = 0; j < n_g; ++j)
      for (int l = 0; l < n_h; ++l)
        for (int k = 0; k < n_h; ++k)
          fit_residual = std::max(
              fit_residual, std::abs(gram(at(i, l), at(j, k)) - rowmean(i, j) - colmean(l, k) + grand));
  if (fit_residual > tol) return std::nullopt;

  Matrix m0 = rowmean.array() - grand;
  const Matrix& n0 = colmean;
  double gamma0 = m0.diagonal().mean();
  const Matrix j_g = ones(n_g, n_g);
  const Matrix j_h = ones(n_h, n_h);

  // Everything the shift must satisfy is an interval in c: both PSD
  // conditions (lambda_min of an affine family is concave) and the
  // renormalized edge constraints (linear in c).
  auto psd_score = [&](double c) {
    return std::min(min_eig(m0 + c * j_g), min_eig(n0 - c * j_h));
  };
  double span = 1.0 + gram.cwiseAbs().maxCoeff() * std::max(n_g, n_h);
  double lo = -span, hi = span;
  for (int it = 0; it < 60; ++it) {
    double c1 = lo + (hi - lo) / 3.0, c2 = hi - (hi - lo) / 3.0;
    if (psd_score(c1) < psd_score(c2))
      lo = c1;
    else
      hi = c2;
  }
  double c_peak = 0.5 * (lo + hi);
  if (psd_score(c_peak) < -tol) return std::nullopt;
  auto bisect_boundary = [&](double inside, double outside) {
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (inside + outside);
      if (psd_score(mid) >= -tol)
        inside = mid;
      else
        outside = mid;
    }
    return inside;
  };
  double c_lo = psd_score(-span) >= -tol ? -span : bisect_boundary(c_peak, -span);
  double c_hi = psd_score(span) >= -tol ? span : bisect_boundary(c_peak, span);

  for (auto [i, j] : g.edges())
    c_hi = std::min(c_hi, (-(t - 1.0) * m0(i, j) - (1.0 - tol) * gamma0) / (t - tol));
  for (auto [l, k] : h.edges())
    c_lo = std::max(c_lo, ((t - 1.0) * n0(l, k) + (1.0 - tol) * (t - 1.0 - gamma0)) / (t - tol));
  // alpha within [0, 1] up to tolerance
  c_lo = std::max(c_lo, -gamma0 - tol);
  c_hi = std::min(c_hi, t - 1.0 - gamma0 + tol);
  if (c_lo > c_hi + 1e-12) return std::nullopt;

  double c = 0.5 * (c_lo + c_hi);
  double gamma = gamma0 + c;
  double alpha = std::clamp(gamma / (t - 1.0), 0.0, 1.0);
  Matrix m_shift = m0 + c * j_g;
  Matrix n_shift = n0 - c * j_h;

  ConvexDecomposition dec;
  dec.alpha = alpha;
  dec.fit_residual = fit_residual;
  const double pure_eps = 1e-9;
  auto valid_part = [&](const Matrix& part, const Graph& graph) {
    if (min_eig(part) < -10 * tol) return false;
    for (int v = 0; v < graph.vertex_count(); ++v)
      if (std::abs(part(v, v) - (t - 1.0)) > 10 * tol) return false;
    for (auto [i, j] : graph.edges())
      if (part(i, j) > -1.0 + 10 * tol) return false;
    return true;
  };
  if (alpha > pure_eps) {
    dec.m_part = m_shift / alpha;
    if (!valid_part(dec.m_part, g)) return std::nullopt;
  }
  if (alpha < 1.0 - pure_eps) {
    dec.n_part = n_shift / (1.0 - alpha);
    if (!valid_part(dec.n_part, h)) return std::nullopt;
  }
  return dec;
}

namespace {

struct PairChi {
  ChiResult g, h;
  bool swapped = false;
};

PairChi solve_pair_sorted(const Graph& g, const Graph& h, const SolveParams& params, Graph& g_out,
                          Graph& h_out) {
  PairChi pair;
  pair.g = chi_v(g, params);
  pair.h = chi_v(h, params);
  g_out = g;
  h_out = h;
  if (pair.g.t > pair.h.t + 1e-6) {
    std::swap(pair.g, pair.h);
    std::swap(g_out, h_out);
    pair.swapped = true;
  }
  return pair;
}

struct RankEstimate {
  int rank_primal = 0;
  int corank_dual = 0;
  bool certified = false;
};

RankEstimate estimate_rank(const ChiResult& chi, double rank_tol) {
  RankEstimate est;
  est.rank_primal = numeric_rank(chi.coloring.gram, rank_tol);
  est.corank_dual = chi.witness.corank;
  est.certified = est.rank_primal == est.corank_dual;
  return est;
}

}  // namespace

ProductAnalysis rank_accounting(const Graph& g_in, const Graph& h_in, const SolveParams& params) {
  Graph g, h;
  PairChi pair = solve_pair_sorted(g_in, h_in, params, g, h);
  Graph product = categorical_product(g, h);
  auto chi_p = chi_v(product, params);

  ProductAnalysis out;
  out.swapped = pair.swapped;
  out.chi_g = pair.g.t;
  out.chi_h = pair.h.t;
  out.chi_product = chi_p.t;
  out.kase = std::abs(pair.g.t - pair.h.t) <= 1e-6 ? ProductCase::Equal : ProductCase::LessThan;
  out.min_residual = std::abs(chi_p.t - std::min(pair.g.t, pair.h.t));

  auto est_g = estimate_rank(pair.g, params.rank_tol);
  auto est_h = estimate_rank(pair.h, params.rank_tol);
  auto est_p = estimate_rank(chi_p, params.rank_tol);
  out.rk_g = est_g.rank_primal;
  out.rk_h = est_h.rank_primal;
  out.rk_product = est_p.rank_primal;
  out.rk_g_certified = est_g.certified;
  out.rk_h_certified = est_h.certified;
  out.rk_product_certified = est_p.certified;
  out.rk_product_low = std::min(est_p.rank_primal, est_p.corank_dual);
  out.rk_product_high = std::max(est_p.rank_primal, est_p.corank_dual);

  out.verdict = ProductVerdict::Inconclusive;
  if (out.kase == ProductCase::LessThan) {
    if (est_g.certified && est_p.certified && out.rk_product == out.rk_g)
      out.verdict = ProductVerdict::AllInducedByG;
  } else {
    if (est_g.certified && est_h.certified && est_p.certified &&
        out.rk_product == out.rk_g + out.rk_h)
      out.verdict = ProductVerdict::AllConvexCombinations;
  }
  return out;
}

CorollaryOutcome corollary_pipeline(const Graph& g_in, const Graph& h_in, const SolveParams& params) {
  Graph g, h;
  PairChi pair = solve_pair_sorted(g_in, h_in, params, g, h);
  CorollaryOutcome out;
  out.swapped = pair.swapped;
  out.kase = std::abs(pair.g.t - pair.h.t) <= 1e-6 ? ProductCase::Equal : ProductCase::LessThan;

  auto sc_g = strict_complementarity(pair.g.coloring, pair.g.witness, params.rank_tol);
  auto sc_h = strict_complementarity(pair.h.coloring, pair.h.witness, params.rank_tol);
  out.g_strictly_complementary = sc_g.verdict;
  out.h_strictly_complementary = sc_h.verdict;
  out.g_positive_diagonal = pair.g.witness.positive_diagonal;
  out.g_connected_dual = pair.g.witness.connected;
  out.h_connected_dual = pair.h.witness.connected;
  out.h_connected_graph = is_connected(h);

  if (!g.has_edges() || !h.has_edges()) {
    out.status = CorollaryStatus::HypothesisNotMet;
    out.failure_reason = "a factor is empty";
    return out;
  }

  int rk_g = pair.g.witness.corank;
  int rk_h = pair.h.witness.corank;
  if (out.kase == ProductCase::LessThan) {
    if (!(sc_g.verdict && out.g_positive_diagonal && out.h_connected_graph)) {
      out.status = CorollaryStatus::HypothesisNotMet;
      out.failure_reason = !sc_g.verdict             ? "factor G is not strictly complementary"
                           : !out.g_positive_diagonal ? "strictly complementary dual of G lacks positive diagonal"
                                                      : "factor H is disconnected";
      return out;
    }
    out.expected_corank = rk_g;
  } else {
    if (!(sc_g.verdict && out.g_connected_dual && sc_h.verdict && out.h_connected_dual)) {
      out.status = CorollaryStatus::HypothesisNotMet;
      out.failure_reason = "equal case requires connected strictly complementary duals on both factors";
      return out;
    }
    out.expected_corank = rk_g + rk_h;
  }

  AForm af_g = b_to_a(pair.g.witness);
  Matrix a_h;
  Vector perron_h;
  double mu = 0.0;
  if (out.kase == ProductCase::Equal) {
    AForm af_h = b_to_a(pair.h.witness);
    a_h = af_h.a;
    perron_h = af_h.perron;
    mu = std::max(af_g.lambda_max, af_h.lambda_max);
  } else {
    // Perturbed almost-optimal solution for the larger factor: strictly
    // dominant simple top eigenvalue, positive top eigenvector, lambda_min -1,
    // connected support.
    AForm af_h_opt = b_to_a(pair.h.witness);
    Matrix adjacency = h.adjacency_matrix();
    double eps = 1e-2;
    bool built = false;
    while (eps >= 1e-8) {
      Matrix cand = af_h_opt.a + eps * adjacency;
      auto dec = eig_sym(cand);
      double lam_min = dec.eigenvalues[dec.eigenvalues.size() - 1];
      if (lam_min < -1e-12) {
        Matrix scaled = cand / -lam_min;
        auto sdec = eig_sym(scaled);
        double l1 = sdec.eigenvalues[0];
        double l2 = sdec.eigenvalues.size() > 1 ? sdec.eigenvalues[1] : -1.0;
        Vector top = sdec.eigenvectors.col(0);
        Eigen::Index imax;
        top.cwiseAbs().maxCoeff(&imax);
        if (top[imax] < 0) top = -top;
        bool simple = l1 - l2 > 1e-9 * std::max(1.0, l1);
        bool positive = top.minCoeff() > 1e-9;
        bool exceeds = l1 > af_g.lambda_max + 1e-9;
        if (simple && positive && exceeds) {
          a_h = scaled;
          perron_h = top.normalized();
          mu = l1;
          out.epsilon_used = eps;
          built = true;
          break;
        }
      }
      eps *= 0.5;
    }
    if (!built) {
      out.status = CorollaryStatus::ConstructionFailed;
      out.failure_reason = "perturbation schedule exhausted";
      return out;
    }
  }

  Graph product = categorical_product(g, h);
  AForm af_prod;
  af_prod.a = kron(af_g.a, a_h) / mu;
  auto pdec = eig_sym(af_prod.a);
  af_prod.lambda_max = pdec.eigenvalues[0];
  af_prod.lambda_min = pdec.eigenvalues[pdec.eigenvalues.size() - 1];
  af_prod.perron = kron(Matrix(af_g.perron), Matrix(perron_h)).col(0).normalized();
  DualWitness dual_prod = a_to_b(af_prod, product, params.rank_tol);
  out.product_dual_value = dual_prod.b.sum();
  out.product_corank = dual_prod.corank;

  bool value_ok = std::abs(out.product_dual_value - pair.g.t) <= 1e-5;
  if (value_ok && out.product_corank == out.expected_corank) {
    out.status = CorollaryStatus::Certified;
  } else {
    out.status = CorollaryStatus::ConstructionFailed;
    out.failure_reason = value_ok ? "product dual corank does not match the factor ranks"
                                  : "product dual misses the optimal value";
  }
  return out;
}

NecessaryReport necessary_conditions(const Graph& g_in, const Graph& h_in, const SolveParams& params) {
  NecessaryReport report;
  auto analysis = rank_accounting(g_in, h_in, params);
  report.kase = analysis.kase;
  report.swapped = analysis.swapped;
  report.accounting_verdict = analysis.verdict;

  const Graph& g = analysis.swapped ? h_in : g_in;
  const Graph& h = analysis.swapped ? g_in : h_in;
  auto skel_g = skeleton(g, params);
  auto skel_h = skeleton(h, params);
  for (int v = 0; v < skel_g.graph.vertex_count(); ++v)
    if (skel_g.graph.degree(v) == 0) report.non_neighborly_g.push_back(v);
  report.skeleton_g_connected = is_connected(skel_g.graph);
  report.skeleton_h_connected = is_connected(skel_h.graph);

  if (report.kase == ProductCase::LessThan) {
    report.conditions_met = report.non_neighborly_g.empty() && is_connected(h);
    report.contradiction =
        analysis.verdict == ProductVerdict::AllInducedByG && !report.non_neighborly_g.empty();
  } else {
    report.conditions_met = report.skeleton_g_connected && report.skeleton_h_connected;
    report.contradiction = analysis.verdict == ProductVerdict::AllConvexCombinations &&
                           !(report.skeleton_g_connected && report.skeleton_h_connected);
  }
  return report;
}

ProductDependency build_product_dependency(const NeighborlinessWitness& witness_g,
                                           const NeighborlinessWitness& witness_h,
                                           const VectorColoring& vc_g, const VectorColoring& vc_h,
                                           double t) {
  // Convert the convex witnesses to conical form; the coefficient sums are
  // forced to t-1 by tightness and any mismatch means the inputs are stale.
  auto conical = [t](const NeighborlinessWitness& w) {
    auto self = w.coefficients.find(w.vertex);
    if (self == w.coefficients.end() || self->second <= 0)
      throw std::invalid_argument("build_product_dependency: witness lacks positive self-weight");
    std::map<int, double> out;
    double sum = 0.0;
    for (auto [j, c] : w.coefficients) {
      if (j == w.vertex) continue;
      out[j] = c / self->second;
      sum += c / self->second;
    }
    if (std::abs(sum - (t - 1.0)) > 1e-6)
      throw std::invalid_argument("build_product_dependency: conical normalization mismatch");
    return out;
  };
  auto alpha = conical(witness_g);
  auto beta = conical(witness_h);

  const int n_h = static_cast<int>(vc_h.gram.rows());
  ProductDependency dep;
  dep.vertex_flat = witness_g.vertex * n_h + witness_h.vertex;
  for (auto [j, a] : alpha)
    for (auto [k, b] : beta) dep.coefficients[j * n_h + k] = a * b / (t - 1.0);

  // Residual under the balanced direct-sum coloring w = (p (+) q)/sqrt(2).
  const int d_g = static_cast<int>(vc_g.factors.cols());
  const int d_h = static_cast<int>(vc_h.factors.cols());
  auto w_vec = [&](int i, int l) {
    Vector w(d_g + d_h);
    w.head(d_g) = vc_g.factors.row(i).transpose();
    w.tail(d_h) = vc_h.factors.row(l).transpose();
    return Vector((w / std::sqrt(2.0)).eval());
  };
  Vector acc = w_vec(witness_g.vertex, witness_h.vertex);
  for (auto [flat, coef] : dep.coefficients) acc += coef * w_vec(flat / n_h, flat % n_h);
  dep.residual = acc.norm();
  return dep;
}

}  // namespace vclab
