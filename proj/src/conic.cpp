#include "vclab/conic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vclab {

namespace {

double constraint_dot_psd(const std::vector<SymEntry>& entries, const Matrix& x) {
  double sum = 0.0;
  for (const auto& e : entries) sum += (e.i == e.j ? 1.0 : 2.0) * e.value * x(e.i, e.j);
  return sum;
}

double constraint_dot(const ConicConstraint& c, const Matrix& x1, const Vector& x2) {
  double sum = constraint_dot_psd(c.psd, x1);
  for (const auto& [idx, v] : c.nonneg) sum += v * x2[idx];
  return sum;
}

void add_scaled_psd(Matrix& target, const std::vector<SymEntry>& entries, double scale) {
  for (const auto& e : entries) {
    target(e.i, e.j) += scale * e.value;
    if (e.i != e.j) target(e.j, e.i) += scale * e.value;
  }
}

// A*(y) over both blocks.
void adjoint(const std::vector<ConicConstraint>& constraints, const Vector& y, Matrix& m1, Vector& m2) {
  m1.setZero();
  m2.setZero();
  for (size_t k = 0; k < constraints.size(); ++k) {
    if (y[static_cast<Eigen::Index>(k)] == 0.0) continue;
    add_scaled_psd(m1, constraints[k].psd, y[static_cast<Eigen::Index>(k)]);
    for (const auto& [idx, v] : constraints[k].nonneg) m2[idx] += v * y[static_cast<Eigen::Index>(k)];
  }
}

double constraint_norm(const ConicConstraint& c) {
  double sum = 0.0;
  for (const auto& e : c.psd) sum += (e.i == e.j ? 1.0 : 2.0) * e.value * e.value;
  for (const auto& [idx, v] : c.nonneg) sum += v * v;
  (void)sum;
  return std::sqrt(sum);
}

double constraint_pair_dot(const ConicConstraint& a, const ConicConstraint& b, int psd_size, int nonneg_size) {
  // <A_a, A_b> over the product cone's ambient space.
  double sum = 0.0;
  if (psd_size > 0 && !a.psd.empty() && !b.psd.empty()) {
    for (const auto& ea : a.psd)
      for (const auto& eb : b.psd)
        if (ea.i == eb.i && ea.j == eb.j) sum += (ea.i == ea.j ? 1.0 : 2.0) * ea.value * eb.value;
  }
  if (nonneg_size > 0) {
    for (const auto& [ia, va] : a.nonneg)
      for (const auto& [ib, vb] : b.nonneg)
        if (ia == ib) sum += va * vb;
  }
  return sum;
}

struct FilteredProblem {
  std::vector<int> kept;  // indices into the original constraint list
};

// Greedy rank filter on the constraint Gram matrix. Dependent rows whose rhs
// matches the implied combination are dropped; inconsistent ones are rejected.
FilteredProblem filter_constraints(const ConicProblem& p) {
  const int count = static_cast<int>(p.constraints.size());
  FilteredProblem out;
  if (count == 0) return out;
  Matrix gram(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = a; b < count; ++b) {
      double d = constraint_pair_dot(p.constraints[a], p.constraints[b], p.psd_size, p.nonneg_size);
      gram(a, b) = d;
      gram(b, a) = d;
    }
  auto dec = eig_sym(gram);
  double top = dec.eigenvalues.size() ? std::max(dec.eigenvalues[0], 0.0) : 0.0;
  if (dec.eigenvalues[count - 1] > 1e-12 * std::max(1.0, top)) {
    out.kept.resize(count);
    for (int k = 0; k < count; ++k) out.kept[k] = k;
    return out;
  }

  // Incremental Cholesky of the kept-rows Gram.
  Matrix chol = Matrix::Zero(count, count);
  std::vector<double> kept_rhs;
  for (int k = 0; k < count; ++k) {
    int r = static_cast<int>(out.kept.size());
    Vector cross(r);
    for (int l = 0; l < r; ++l) cross[l] = gram(out.kept[l], k);
    Vector w(r);
    for (int l = 0; l < r; ++l) {
      double s = cross[l];
      for (int q = 0; q < l; ++q) s -= chol(l, q) * w[q];
      w[l] = s / chol(l, l);
    }
    double res2 = gram(k, k) - w.squaredNorm();
    double thr = 1e-12 * std::max(1.0, gram(k, k));
    if (res2 > thr) {
      for (int l = 0; l < r; ++l) chol(r, l) = w[l];
      chol(r, r) = std::sqrt(res2);
      out.kept.push_back(k);
      kept_rhs.push_back(p.constraints[k].rhs);
    } else {
      // coefficients of the combination: solve L^T c = w
      Vector coeff(r);
      for (int l = r - 1; l >= 0; --l) {
        double s = w[l];
        for (int q = l + 1; q < r; ++q) s -= chol(q, l) * coeff[q];
        coeff[l] = s / chol(l, l);
      }
      double implied = 0.0;
      for (int l = 0; l < r; ++l) implied += coeff[l] * kept_rhs[l];
      if (std::abs(implied - p.constraints[k].rhs) > 1e-9 * (1.0 + std::abs(p.constraints[k].rhs)))
        throw std::invalid_argument("conic solve: inconsistent dependent constraint");
    }
  }
  return out;
}

struct NtScaling {
  // PSD block: X = R lambda R^T, Z = R^{-T} lambda R^{-1}, W = R R^T.
  Matrix r, r_inv, w;
  Vector lambda1;
  // Orthant block.
  Vector w2, lambda2;
};

struct Direction {
  Matrix dx1, dz1;
  Vector dx2, dz2, dy;
};

double max_step_psd(const Eigen::LLT<Matrix>& llt, const Matrix& delta) {
  Matrix g = llt.matrixL().solve(delta);
  g = llt.matrixL().solve(g.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(g), Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  if (lo >= -1e-14) return 1e100;
  return -1.0 / lo;
}

double max_step_orthant(const Vector& x, const Vector& dx) {
  double step = 1e100;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx[i] < 0) step = std::min(step, -x[i] / dx[i]);
  return step;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolveConfig& config) {
  const int n1 = problem.psd_size;
  const int m = problem.nonneg_size;
  if (n1 < 0 || m < 0 || n1 + m == 0)
    throw std::invalid_argument("conic solve: empty cone");
  if (n1 > 0 && (problem.c_psd.rows() != n1 || problem.c_psd.cols() != n1))
    throw std::invalid_argument("conic solve: objective PSD block size mismatch");
  if (m > 0 && problem.c_nonneg.size() != m)
    throw std::invalid_argument("conic solve: objective orthant size mismatch");
  if (n1 > 0 && !problem.c_psd.allFinite())
    throw std::invalid_argument("conic solve: non-finite objective");

  auto filtered = filter_constraints(problem);
  std::vector<ConicConstraint> cons;
  cons.reserve(filtered.kept.size());
  for (int k : filtered.kept) cons.push_back(problem.constraints[k]);
  const int p = static_cast<int>(cons.size());

  const Matrix c1 = n1 > 0 ? symmetrize(problem.c_psd) : Matrix(0, 0);
  const Vector c2 = m > 0 ? problem.c_nonneg : Vector(0);
  Vector b(p);
  for (int k = 0; k < p; ++k) b[k] = cons[k].rhs;

  const double nu = n1 + m;
  const double b_norm = p > 0 ? b.norm() : 0.0;
  const double c_norm = std::sqrt((n1 > 0 ? c1.squaredNorm() : 0.0) + (m > 0 ? c2.squaredNorm() : 0.0));

  double start_scale = std::max(1.0, p > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  Matrix x1 = n1 > 0 ? Matrix(start_scale * Matrix::Identity(n1, n1)) : Matrix(0, 0);
  Vector x2 = Vector::Constant(m, start_scale);
  Matrix z1 = n1 > 0 ? Matrix(std::max(1.0, c_norm) * Matrix::Identity(n1, n1)) : Matrix(0, 0);
  Vector z2 = Vector::Constant(m, std::max(1.0, c_norm));
  Vector y = Vector::Zero(p);

  ConicSolution best;
  double best_metric = 1e300;
  int stall = 0;

  ConicSolution sol;
  sol.status = ConicSolution::Status::IterationLimit;
  sol.message = "iteration cap exceeded";

  Matrix adj1(n1, n1), rd1(n1, n1);
  Vector adj2(m), rd2(m);

  auto record = [&](ConicSolution::Status status, const std::string& message, int iters) {
    sol.status = status;
    sol.message = message;
    sol.iterations = iters;
    sol.x_psd = x1;
    sol.x_nonneg = x2;
    sol.z_psd = z1;
    sol.z_nonneg = z2;
    sol.multipliers = Vector::Zero(static_cast<Eigen::Index>(problem.constraints.size()));
    for (int k = 0; k < p; ++k) sol.multipliers[filtered.kept[k]] = y[k];
  };

  int iter = 0;
  for (; iter <= config.max_iterations; ++iter) {
    // Residuals and convergence metrics.
    Vector rp(p);
    for (int k = 0; k < p; ++k) rp[k] = b[k] - constraint_dot(cons[k], x1, x2);
    adjoint(cons, y, adj1, adj2);
    if (n1 > 0) rd1 = c1 - z1 - adj1;
    if (m > 0) rd2 = c2 - z2 - adj2;

    double pobj = (n1 > 0 ? c1.cwiseProduct(x1).sum() : 0.0) + (m > 0 ? c2.dot(x2) : 0.0);
    double dobj = p > 0 ? b.dot(y) : 0.0;
    double gap = (n1 > 0 ? x1.cwiseProduct(z1).sum() : 0.0) + (m > 0 ? x2.dot(z2) : 0.0);
    double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    double pres = (p > 0 ? rp.norm() : 0.0) / (1.0 + b_norm);
    double dres = std::sqrt((n1 > 0 ? rd1.squaredNorm() : 0.0) + (m > 0 ? rd2.squaredNorm() : 0.0)) /
                  (1.0 + c_norm);

    double metric = std::max({relgap, pres, dres});
    if (metric < best_metric) {
      best_metric = metric;
      record(sol.status, sol.message, iter);
      best = sol;
    }
    if (relgap <= config.tol && pres <= config.tol && dres <= config.tol) {
      record(ConicSolution::Status::Optimal, "converged", iter);
      break;
    }
    if (iter == config.max_iterations) {
      record(ConicSolution::Status::IterationLimit, "iteration cap exceeded", iter);
      break;
    }

    double mu = gap / nu;

    // Nesterov-Todd scaling point.
    NtScaling nt;
    Eigen::LLT<Matrix> llt_x, llt_z;
    if (n1 > 0) {
      llt_x.compute(x1);
      llt_z.compute(z1);
      if (llt_x.info() != Eigen::Success || llt_z.info() != Eigen::Success) {
        record(ConicSolution::Status::NumericalProblem, "cone factorization failed", iter);
        break;
      }
      Matrix lx = llt_x.matrixL();
      Matrix lz = llt_z.matrixL();
      Eigen::JacobiSVD<Matrix> svd(lz.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
      nt.lambda1 = svd.singularValues();
      if (nt.lambda1.minCoeff() <= 0) {
        record(ConicSolution::Status::NumericalProblem, "NT scaling breakdown", iter);
        break;
      }
      Vector inv_sqrt = nt.lambda1.cwiseSqrt().cwiseInverse();
      nt.r = lx * svd.matrixV() * inv_sqrt.asDiagonal();
      nt.r_inv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * lz.transpose();
      nt.w = nt.r * nt.r.transpose();
    }
    if (m > 0) {
      nt.w2 = (x2.array() / z2.array()).sqrt().matrix();
      nt.lambda2 = (x2.array() * z2.array()).sqrt().matrix();
    }

    // Schur complement of the scaled KKT system.
    Matrix schur_mat(p, p);
    if (p > 0) {
      Matrix u_l(n1, n1);
      for (int l = 0; l < p; ++l) {
        if (n1 > 0) {
          u_l.setZero();
          for (const auto& e : cons[l].psd) {
            u_l.noalias() += e.value * nt.w.col(e.i) * nt.w.col(e.j).transpose();
            if (e.i != e.j) u_l.noalias() += e.value * nt.w.col(e.j) * nt.w.col(e.i).transpose();
          }
        }
        for (int k = 0; k < p; ++k) {
          double v = n1 > 0 ? constraint_dot_psd(cons[k].psd, u_l) : 0.0;
          if (m > 0)
            for (const auto& [ia, va] : cons[k].nonneg)
              for (const auto& [ib, vb] : cons[l].nonneg)
                if (ia == ib) v += va * vb * nt.w2[ia] * nt.w2[ia];
          schur_mat(k, l) = v;
        }
      }
      schur_mat = symmetrize(0.5 * (schur_mat + schur_mat.transpose()));
    }
    Eigen::LLT<Matrix> schur_llt;
    if (p > 0) {
      double jitter = 0.0;
      double base = schur_mat.diagonal().cwiseAbs().mean();
      for (int attempt = 0; attempt < 7; ++attempt) {
        Matrix regularized = schur_mat;
        regularized.diagonal().array() += jitter;
        schur_llt.compute(regularized);
        if (schur_llt.info() == Eigen::Success) break;
        jitter = jitter == 0.0 ? 1e-14 * std::max(base, 1.0) : 10 * jitter;
      }
      if (schur_llt.info() != Eigen::Success) {
        record(ConicSolution::Status::NumericalProblem, "Newton system factorization failed", iter);
        break;
      }
    }

    auto solve_direction = [&](const Matrix& dc1, const Vector& dc2) {
      Direction dir;
      Matrix e1(n1, n1);
      Vector e2(m);
      Matrix u1(n1, n1);
      if (n1 > 0) {
        for (int a = 0; a < n1; ++a)
          for (int bb = 0; bb < n1; ++bb) u1(a, bb) = 2.0 * dc1(a, bb) / (nt.lambda1[a] + nt.lambda1[bb]);
        e1 = nt.r * u1 * nt.r.transpose() - nt.w * rd1 * nt.w;
      }
      if (m > 0) {
        Vector u2 = dc2.cwiseQuotient(nt.lambda2);
        e2 = nt.w2.cwiseProduct(u2) - nt.w2.cwiseProduct(nt.w2).cwiseProduct(rd2);
      }
      if (p > 0) {
        Vector rhs(p);
        for (int k = 0; k < p; ++k) {
          double v = rp[k];
          if (n1 > 0) v -= constraint_dot_psd(cons[k].psd, e1);
          if (m > 0)
            for (const auto& [idx, w] : cons[k].nonneg) v -= w * e2[idx];
          rhs[k] = v;
        }
        dir.dy = schur_llt.solve(rhs);
      } else {
        dir.dy = Vector(0);
      }
      Matrix dadj1(n1, n1);
      Vector dadj2(m);
      adjoint(cons, dir.dy, dadj1, dadj2);
      if (n1 > 0) {
        dir.dz1 = symmetrize(rd1 - dadj1);
        dir.dx1 = symmetrize(e1 + nt.w * dadj1 * nt.w);
      }
      if (m > 0) {
        dir.dz2 = rd2 - dadj2;
        dir.dx2 = e2 + nt.w2.cwiseProduct(nt.w2).cwiseProduct(dadj2);
      }
      return dir;
    };

    // Predictor.
    Matrix dc1_aff(n1, n1);
    if (n1 > 0) {
      dc1_aff.setZero();
      dc1_aff.diagonal() = -nt.lambda1.cwiseProduct(nt.lambda1);
    }
    Vector dc2_aff = m > 0 ? Vector(-nt.lambda2.cwiseProduct(nt.lambda2)) : Vector(0);
    Direction aff = solve_direction(dc1_aff, dc2_aff);

    double ap = 1e100, ad = 1e100;
    if (n1 > 0) {
      ap = std::min(ap, max_step_psd(llt_x, aff.dx1));
      ad = std::min(ad, max_step_psd(llt_z, aff.dz1));
    }
    if (m > 0) {
      ap = std::min(ap, max_step_orthant(x2, aff.dx2));
      ad = std::min(ad, max_step_orthant(z2, aff.dz2));
    }
    double ap_aff = std::min(1.0, ap);
    double ad_aff = std::min(1.0, ad);

    double gap_aff = 0.0;
    if (n1 > 0) gap_aff += (x1 + ap_aff * aff.dx1).cwiseProduct(z1 + ad_aff * aff.dz1).sum();
    if (m > 0) gap_aff += (x2 + ap_aff * aff.dx2).dot(z2 + ad_aff * aff.dz2);
    double mu_aff = std::max(gap_aff, 0.0) / nu;
    double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector with the Mehrotra second-order term in the scaled space.
    Matrix dc1(n1, n1);
    if (n1 > 0) {
      Matrix g1 = nt.r_inv * aff.dx1 * nt.r_inv.transpose();
      Matrix g2 = nt.r.transpose() * aff.dz1 * nt.r;
      Matrix corr = 0.5 * (g1 * g2 + g2 * g1);
      dc1 = -corr;
      dc1.diagonal().array() += sigma * mu;
      dc1.diagonal() -= nt.lambda1.cwiseProduct(nt.lambda1);
      dc1 = symmetrize(0.5 * (dc1 + dc1.transpose()));
    }
    Vector dc2(m);
    if (m > 0) {
      Vector g1 = aff.dx2.cwiseQuotient(nt.w2);
      Vector g2 = nt.w2.cwiseProduct(aff.dz2);
      dc2 = Vector::Constant(m, sigma * mu) - nt.lambda2.cwiseProduct(nt.lambda2) - g1.cwiseProduct(g2);
    }
    Direction dir = solve_direction(dc1, dc2);

    ap = 1e100;
    ad = 1e100;
    if (n1 > 0) {
      ap = std::min(ap, max_step_psd(llt_x, dir.dx1));
      ad = std::min(ad, max_step_psd(llt_z, dir.dz1));
    }
    if (m > 0) {
      ap = std::min(ap, max_step_orthant(x2, dir.dx2));
      ad = std::min(ad, max_step_orthant(z2, dir.dz2));
    }
    const double eta = 0.98;
    double alpha_p = std::min(1.0, eta * ap);
    double alpha_d = std::min(1.0, eta * ad);

    if (alpha_p < 1e-8 && alpha_d < 1e-8) {
      if (++stall >= 2) {
        record(ConicSolution::Status::NumericalProblem, "step sizes collapsed", iter);
        break;
      }
    } else {
      stall = 0;
    }

    if (n1 > 0) {
      x1 = symmetrize(x1 + alpha_p * dir.dx1);
      z1 = symmetrize(z1 + alpha_d * dir.dz1);
    }
    if (m > 0) {
      x2 += alpha_p * dir.dx2;
      z2 += alpha_d * dir.dz2;
    }
    y += alpha_d * dir.dy;
  }

  if (sol.status != ConicSolution::Status::Optimal && best_metric < 1e300) {
    auto status = sol.status;
    auto message = sol.message;
    sol = best;
    sol.status = status;
    sol.message = message + " (best iterate returned)";
  }

  // Final bookkeeping, recomputed from the returned point.
  Vector rp(static_cast<Eigen::Index>(problem.constraints.size()));
  for (size_t k = 0; k < problem.constraints.size(); ++k)
    rp[static_cast<Eigen::Index>(k)] =
        problem.constraints[k].rhs - constraint_dot(problem.constraints[k], sol.x_psd, sol.x_nonneg);
  Matrix full_adj1(n1, n1);
  Vector full_adj2(m);
  adjoint(problem.constraints, sol.multipliers, full_adj1, full_adj2);
  double drd = 0.0;
  if (n1 > 0) drd += (c1 - sol.z_psd - full_adj1).squaredNorm();
  if (m > 0) drd += (c2 - sol.z_nonneg - full_adj2).squaredNorm();
  sol.primal_objective = (n1 > 0 ? c1.cwiseProduct(sol.x_psd).sum() : 0.0) +
                         (m > 0 ? c2.dot(sol.x_nonneg) : 0.0) + problem.objective_offset;
  double bty = 0.0;
  for (size_t k = 0; k < problem.constraints.size(); ++k)
    bty += problem.constraints[k].rhs * sol.multipliers[static_cast<Eigen::Index>(k)];
  sol.dual_objective = bty + problem.objective_offset;
  sol.gap = (n1 > 0 ? sol.x_psd.cwiseProduct(sol.z_psd).sum() : 0.0) +
            (m > 0 ? sol.x_nonneg.dot(sol.z_nonneg) : 0.0);
  sol.primal_residual = rp.size() > 0 ? rp.norm() / (1.0 + b_norm) : 0.0;
  sol.dual_residual = std::sqrt(drd) / (1.0 + c_norm);
  return sol;
}

ConicProblem vc_primal_problem(const Graph& g) {
  const int n = g.vertex_count();
  if (n < 1) throw std::invalid_argument("vc_primal_problem: graph has no vertices");
  ConicProblem p;
  p.psd_size = n;
  p.nonneg_size = g.edge_count();
  p.c_psd = Matrix::Zero(n, n);
  p.c_psd(n - 1, n - 1) = 1.0;
  p.c_nonneg = Vector::Zero(p.nonneg_size);
  p.objective_offset = 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    ConicConstraint c;
    c.psd = {{i, i, 1.0}, {n - 1, n - 1, -1.0}};
    c.rhs = 0.0;
    p.constraints.push_back(std::move(c));
  }
  int e_idx = 0;
  for (auto [i, j] : g.edges()) {
    ConicConstraint c;
    c.psd = {{i, j, 1.0}};
    c.nonneg = {{e_idx, 1.0}};
    c.rhs = -2.0;
    p.constraints.push_back(std::move(c));
    ++e_idx;
  }
  return p;
}

ConicProblem svc_primal_problem(const Graph& g) {
  ConicProblem p = vc_primal_problem(g);
  p.nonneg_size = 0;
  p.c_nonneg = Vector(0);
  for (auto& c : p.constraints) c.nonneg.clear();
  return p;
}

std::pair<Matrix, double> vc_primal_extract(const ConicSolution& solution, const Graph& g) {
  const int n = g.vertex_count();
  if (solution.x_psd.rows() != n) throw std::invalid_argument("vc_primal_extract: size mismatch");
  Matrix m = symmetrize(solution.x_psd);
  double t = m.diagonal().mean() + 1.0;
  return {m, t};
}

Matrix vc_dual_extract(const ConicSolution& solution, const Graph& g) {
  const int n = g.vertex_count();
  const Vector& y = solution.multipliers;
  if (y.size() != n - 1 + g.edge_count())
    throw std::invalid_argument("vc_dual_extract: multiplier count mismatch");
  Matrix b = Matrix::Zero(n, n);
  double trace_rest = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    b(i, i) = -y[i];
    trace_rest += y[i];
  }
  b(n - 1, n - 1) = 1.0 + trace_rest;
  int e_idx = 0;
  for (auto [i, j] : g.edges()) {
    double v = -y[n - 1 + e_idx];
    if (v < 0.0 && v > -1e-7) v = 0.0;  // dual residual noise only
    b(i, j) = v;
    b(j, i) = v;
    ++e_idx;
  }
  // Feasibility of the reassembled matrix (support and trace hold exactly).
  double diag_min = b.diagonal().minCoeff();
  double off_min = 0.0;
  for (auto [i, j] : g.edges()) off_min = std::min(off_min, b(i, j));
  auto chol = cholesky_psd(b, 1e-7);
  if (!chol.ok || diag_min < -1e-7 || off_min < 0.0)
    throw std::runtime_error("vc_dual_extract: dual infeasibility beyond tolerance");
  return b;
}

}  // namespace vclab
