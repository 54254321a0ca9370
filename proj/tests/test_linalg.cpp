#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vclab/graph.hpp"
#include "vclab/linalg.hpp"

using namespace vclab;

namespace {

Matrix random_symmetric(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      x(i, j) = dist(rng);
      x(j, i) = x(i, j);
    }
  return x;
}

}  // namespace

TEST_CASE("eig_sym on small fixtures") {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  auto dec = eig_sym(x);
  CHECK(dec.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(dec.eigenvalues[1] == doctest::Approx(-1.0));

  auto dec_j = eig_sym(Matrix::Ones(3, 3));
  CHECK(dec_j.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(dec_j.eigenvalues[1] == doctest::Approx(0.0));
  CHECK(dec_j.eigenvalues[2] == doctest::Approx(0.0));

  auto dec_c5 = eig_sym(cycle(5).adjacency_matrix());
  CHECK(dec_c5.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(dec_c5.eigenvalues[4] == doctest::Approx(2.0 * std::cos(4.0 * M_PI / 5.0)).epsilon(1e-10));
}

TEST_CASE("eig_sym rejects non-finite input") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = std::nan("");
  CHECK_THROWS_AS(eig_sym(x), std::invalid_argument);
}

TEST_CASE("eig_sym reconstruction and orthonormality on random matrices") {
  std::mt19937 rng(7);
  for (int n : {1, 2, 5, 17, 33, 60}) {
    Matrix x = random_symmetric(n, rng);
    auto dec = eig_sym(x);
    Matrix recon = dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose();
    CHECK((recon - x).norm() <= 1e-10 * (1.0 + x.norm()));
    CHECK((dec.eigenvectors.transpose() * dec.eigenvectors - Matrix::Identity(n, n)).norm() <= 1e-10);
    for (int i = 1; i < n; ++i) CHECK(dec.eigenvalues[i - 1] >= dec.eigenvalues[i]);
  }
}

TEST_CASE("kron basics and eigenvalue product rule") {
  CHECK((kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)) - Matrix::Identity(6, 6)).norm() == 0.0);

  std::mt19937 rng(11);
  Matrix x = random_symmetric(3, rng);
  Matrix y = random_symmetric(4, rng);
  auto dx = eig_sym(x);
  auto dy = eig_sym(y);
  std::vector<double> products;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) products.push_back(dx.eigenvalues[i] * dy.eigenvalues[j]);
  std::sort(products.begin(), products.end());
  auto dk = eig_sym(kron(x, y));
  Vector got = dk.eigenvalues.reverse();
  for (int k = 0; k < 12; ++k) CHECK(got[k] == doctest::Approx(products[k]).epsilon(1e-9));
}

TEST_CASE("kron indexing matches the product flattening") {
  Graph g = complete(3), h = cycle(4);
  Matrix prod_adj = categorical_product(g, h).adjacency_matrix();
  Matrix kron_adj = kron(g.adjacency_matrix(), h.adjacency_matrix());
  CHECK((prod_adj - kron_adj).norm() == 0.0);
}

TEST_CASE("schur product") {
  std::mt19937 rng(3);
  Matrix x = random_symmetric(4, rng);
  CHECK((schur(Matrix::Ones(4, 4), x) - x).norm() == 0.0);
  CHECK_THROWS_AS(schur(Matrix::Ones(2, 2), Matrix::Ones(3, 3)), std::invalid_argument);
}

TEST_CASE("numeric_rank and kernel_basis") {
  CHECK(numeric_rank(Matrix::Ones(4, 4)) == 1);
  Matrix x = 4.0 * Matrix::Identity(4, 4) - Matrix::Ones(4, 4);
  CHECK(numeric_rank(x) == 3);

  Matrix basis = kernel_basis(Matrix::Ones(3, 3));
  REQUIRE(basis.cols() == 2);
  CHECK((basis.transpose() * basis - Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((Vector::Ones(3).transpose() * basis).norm() <= 1e-12);

  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix y = random_symmetric(6, rng);
    CHECK(numeric_rank(y) + kernel_basis(y).cols() == 6);
  }
}

TEST_CASE("cholesky_psd") {
  auto ok = cholesky_psd(Matrix::Identity(3, 3));
  REQUIRE(ok.ok);
  CHECK((ok.factor - Matrix::Identity(3, 3)).norm() <= 1e-4);

  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  auto report = cholesky_psd(bad);
  REQUIRE_FALSE(report.ok);
  CHECK(report.witness_value == doctest::Approx(-1.0));
  double vtxv = report.witness.transpose() * bad * report.witness;
  CHECK(vtxv == doctest::Approx(-1.0));
  CHECK(std::abs(std::abs(report.witness[0]) - 1.0 / std::sqrt(2.0)) <= 1e-10);

  for (int m = 1; m <= 10; ++m) {
    Matrix x = m * Matrix::Identity(m, m) - Matrix::Ones(m, m);
    CHECK(cholesky_psd(x).ok);
  }
}

TEST_CASE("nnls_membership fixtures") {
  auto zero = nnls_membership(Vector::Zero(3), {Vector::Random(3), Vector::Random(3)}, 1e-9);
  REQUIRE(zero.feasible);
  CHECK(zero.coefficients.norm() <= 1e-9);

  Vector target(2);
  target << 1, 1;
  Vector e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  auto basic = nnls_membership(target, {e1, e2}, 1e-9);
  REQUIRE(basic.feasible);
  CHECK(basic.coefficients[0] == doctest::Approx(1.0));
  CHECK(basic.coefficients[1] == doctest::Approx(1.0));

  // Rows of the 3I-J factorization sum to zero, so -p_0 = p_1 + p_2.
  Matrix m = 3.0 * Matrix::Identity(3, 3) - Matrix::Ones(3, 3);
  auto dec = eig_sym(m);
  Matrix p(3, 2);
  for (int c = 0; c < 2; ++c) p.col(c) = dec.eigenvectors.col(c) * std::sqrt(dec.eigenvalues[c]);
  auto tri = nnls_membership(-p.row(0).transpose(), {p.row(1).transpose(), p.row(2).transpose()}, 1e-9);
  REQUIRE(tri.feasible);
  CHECK(tri.coefficients[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(tri.coefficients[1] == doctest::Approx(1.0).epsilon(1e-7));

  auto empty = nnls_membership(target, {}, 1e-9);
  CHECK_FALSE(empty.feasible);
  CHECK(empty.residual == doctest::Approx(target.norm()));
}

TEST_CASE("nnls_membership reconstructs feasible targets") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> coef(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 3 + trial % 3;
    int k = 2 + trial % 4;
    std::vector<Vector> gens;
    for (int i = 0; i < k; ++i) gens.push_back(Vector::Random(d));
    Vector target = Vector::Zero(d);
    for (int i = 0; i < k; ++i) target += coef(rng) * gens[i];
    auto fit = nnls_membership(target, gens, 1e-8);
    REQUIRE(fit.feasible);
    Vector recon = Vector::Zero(d);
    for (int i = 0; i < k; ++i) recon += fit.coefficients[i] * gens[i];
    CHECK((recon - target).norm() <= 1e-8 * (1.0 + target.norm()));
    CHECK(fit.coefficients.minCoeff() >= 0.0);
  }
}

TEST_CASE("lp_solve fixtures") {
  LinearProgram lp;
  lp.eq_lhs = Matrix::Ones(1, 1);
  lp.eq_rhs = Vector::Constant(1, 0.5);
  lp.lower = Vector::Zero(1);
  lp.upper = Vector::Ones(1);
  auto res = lp_feasible(lp);
  REQUIRE(res.status == LpResult::Status::Optimal);
  CHECK(res.x[0] == doctest::Approx(0.5));

  LinearProgram infeasible;
  infeasible.eq_lhs = Matrix::Ones(1, 2);
  infeasible.eq_rhs = Vector::Ones(1);
  infeasible.ineq_lhs = -Matrix::Identity(2, 2);
  infeasible.ineq_rhs = Vector::Constant(2, -2.0);  // x >= 2, y >= 2
  infeasible.lower = Vector::Zero(2);
  infeasible.upper = Vector::Constant(2, 10.0);
  CHECK(lp_feasible(infeasible).status == LpResult::Status::Infeasible);
}

TEST_CASE("lp_solve maximizes slack to an interior point") {
  // Constraints a_i'x + s <= b_i built from a known interior point.
  std::mt19937 rng(21);
  Matrix a(4, 3);
  Vector b(4);
  Vector interior(3);
  interior << 0.3, -0.2, 0.5;
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = dist(rng);
    b[r] = a.row(r).dot(interior) + 0.5;
  }
  LinearProgram lp;
  lp.objective = Vector::Zero(4);
  lp.objective[3] = -1.0;  // maximize the slack variable
  lp.ineq_lhs = Matrix(4, 4);
  lp.ineq_lhs.leftCols(3) = a;
  lp.ineq_lhs.col(3).setOnes();
  lp.ineq_rhs = b;
  lp.lower = Vector::Constant(4, -5.0);
  lp.upper = Vector::Constant(4, 5.0);
  auto res = lp_solve(lp);
  REQUIRE(res.status == LpResult::Status::Optimal);
  CHECK(res.x[3] >= 0.49);
  for (int r = 0; r < 4; ++r) CHECK(a.row(r).dot(res.x.head(3)) < b[r] - 1e-6);
}

TEST_CASE("lp_solve respects equality constraints under optimization") {
  // maximize x0 subject to x0 + x1 = 1 inside the unit box
  LinearProgram lp;
  lp.objective = Vector(2);
  lp.objective << -1.0, 0.0;
  lp.eq_lhs = Matrix::Ones(1, 2);
  lp.eq_rhs = Vector::Ones(1);
  lp.lower = Vector::Zero(2);
  lp.upper = Vector::Ones(2);
  auto res = lp_solve(lp);
  REQUIRE(res.status == LpResult::Status::Optimal);
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(0.0));
}
