#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vclab/product.hpp"

using namespace vclab;

namespace {

Graph petersen() { return kneser(5, 2); }

Graph k3_pendant() { return Graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}); }

}  // namespace

TEST_CASE("induced coloring carries value and entries") {
  Graph g = complete(3), h = complete(4);
  auto chi = chi_v(g);
  auto induced = induced_coloring(chi.coloring, g, h);
  CHECK(induced.t == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(numeric_rank(induced.gram) == 2);
  // Gram[(i,l),(j,k)] = M_ij independent of l and k
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
          CHECK(induced.gram(i * 4 + l, j * 4 + k) ==
                doctest::Approx(chi.coloring.gram(i, j)).epsilon(1e-12));
  CHECK(is_induced_by_g(induced.gram, 3, 4, 1e-8));
  CHECK_FALSE(is_induced_by_h(induced.gram, 3, 4, 1e-8));
}

TEST_CASE("induced coloring onto an empty factor degenerates to the zero coloring") {
  Graph g = complete(3);
  auto chi = chi_v(g);
  auto induced = induced_coloring(chi.coloring, g, Graph(2));
  CHECK(induced.t == doctest::Approx(1.0));
  CHECK(induced.gram.norm() == 0.0);
}

TEST_CASE("direct sum: diagonal, rank, and degenerate weights") {
  Graph g = complete(3);
  auto chi = chi_v(g);
  auto balanced = direct_sum(chi.coloring, chi.coloring, g, g, 0.5);
  for (int v = 0; v < 9; ++v) CHECK(balanced.gram(v, v) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(numeric_rank(balanced.gram) == 4);
  CHECK_FALSE(is_induced_by_g(balanced.gram, 3, 3, 1e-6));

  auto pure = direct_sum(chi.coloring, chi.coloring, g, g, 1.0);
  auto induced = induced_coloring(chi.coloring, g, g);
  CHECK((pure.gram - induced.gram).norm() <= 1e-12);

  for (double alpha : {0.0, 0.25, 0.75}) {
    auto w = direct_sum(chi.coloring, chi.coloring, g, g, alpha);
    for (int v = 0; v < 9; ++v) CHECK(w.gram(v, v) == doctest::Approx(2.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(direct_sum(chi.coloring, chi_v(complete(4)).coloring, g, complete(4), 0.5),
                  std::invalid_argument);
}

TEST_CASE("verify_hedetniemi on named pairs") {
  SUBCASE("K_3 x C_5") {
    auto rep = verify_hedetniemi(complete(3), cycle(5));
    CHECK(rep.pass);
    CHECK(rep.chi_product == doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
    CHECK(rep.certificate_built);
    CHECK(rep.certificate_lambda_min == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(rep.certificate_value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-8));
  }
  SUBCASE("K_4 x K_4") {
    auto rep = verify_hedetniemi(complete(4), complete(4));
    CHECK(rep.pass);
    CHECK(rep.chi_product == doctest::Approx(4.0).epsilon(1e-6));
  }
  SUBCASE("empty factor") {
    auto rep = verify_hedetniemi(complete(3), Graph(3));
    CHECK(rep.pass);
    CHECK(rep.chi_product == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_FALSE(rep.certificate_built);
  }
  SUBCASE("strict variant") {
    auto rep = verify_hedetniemi(complete(3), cycle(5), SolveParams{}, true);
    CHECK(rep.pass);
    CHECK(rep.strict_checked);
    CHECK(rep.strict_product == doctest::Approx(std::sqrt(5.0)).epsilon(1e-5));
  }
}

TEST_CASE("convex decomposition round trips direct sums") {
  Graph g = complete(3);
  auto chi = chi_v(g);
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    auto w = direct_sum(chi.coloring, chi.coloring, g, g, alpha);
    auto dec = convex_decompose(w.gram, g, g, w.t, 1e-6);
    REQUIRE(dec.has_value());
    CHECK(dec->alpha == doctest::Approx(alpha).epsilon(1e-6));
    if (alpha > 1e-6) {
      Matrix expected = 3.0 * Matrix::Identity(3, 3) - Matrix::Ones(3, 3);
      CHECK((dec->m_part - expected).norm() <= 1e-5);
    }
  }
}

TEST_CASE("convex decomposition recovers mixed factor pairs") {
  Graph g = cycle(4), h = cycle(6);  // both bipartite, so both at value 2
  auto chi_g = chi_v(g);
  auto chi_h = chi_v(h);
  auto w = direct_sum(chi_g.coloring, chi_h.coloring, g, h, 0.3);
  auto dec = convex_decompose(w.gram, g, h, w.t, 1e-6);
  REQUIRE(dec.has_value());
  CHECK(dec->alpha == doctest::Approx(0.3).epsilon(1e-6));
  CHECK((dec->m_part - chi_g.coloring.gram).norm() <= 1e-5);
  CHECK((dec->n_part - chi_h.coloring.gram).norm() <= 1e-5);
}

TEST_CASE("convex decomposition rejects non-additive Grams") {
  Graph g = complete(3);
  Graph product = categorical_product(g, g);
  auto chi_p = chi_v(product);
  // The max-rank product Gram is additive, so perturb it off the additive
  // model while keeping symmetry.
  Matrix noisy = chi_p.coloring.gram;
  noisy(0, 4) += 0.05;
  noisy(4, 0) += 0.05;
  noisy(1, 5) -= 0.05;
  noisy(5, 1) -= 0.05;
  auto dec = convex_decompose(noisy, g, g, chi_p.t, 1e-6);
  CHECK_FALSE(dec.has_value());
}

TEST_CASE("K_2 x K_2 solver solution: frozen decomposition fixture") {
  // The product of two K_2's is a perfect matching; its analytic-center Gram
  // is the balanced convex combination of the two induced colorings.
  Graph g = complete(2);
  Graph product = categorical_product(g, g);
  auto chi_p = chi_v(product);
  CHECK(chi_p.t == doctest::Approx(2.0).epsilon(1e-7));
  auto dec = convex_decompose(chi_p.coloring.gram, g, g, chi_p.t, 1e-6);
  REQUIRE(dec.has_value());
  CHECK(dec->alpha == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rank accounting on the less-than case K_3 x K_4") {
  auto analysis = rank_accounting(complete(3), complete(4));
  CHECK(analysis.kase == ProductCase::LessThan);
  CHECK_FALSE(analysis.swapped);
  CHECK(analysis.rk_g == 2);
  CHECK(analysis.rk_product == 2);
  CHECK(analysis.rk_product_certified);
  CHECK(analysis.verdict == ProductVerdict::AllInducedByG);
  CHECK(analysis.min_residual <= 1e-6);
}

TEST_CASE("rank accounting on the equal case K_3 x K_3") {
  auto analysis = rank_accounting(complete(3), complete(3));
  CHECK(analysis.kase == ProductCase::Equal);
  CHECK(analysis.rk_g == 2);
  CHECK(analysis.rk_h == 2);
  CHECK(analysis.rk_product == 4);
  CHECK(analysis.verdict == ProductVerdict::AllConvexCombinations);
}

TEST_CASE("rank accounting swaps factors so chi_g <= chi_h") {
  auto analysis = rank_accounting(complete(4), complete(3));
  CHECK(analysis.swapped);
  CHECK(analysis.chi_g == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(analysis.verdict == ProductVerdict::AllInducedByG);
}

TEST_CASE("rank accounting on K_2 x K_2: disconnected product, frozen fixture") {
  auto analysis = rank_accounting(complete(2), complete(2));
  CHECK(analysis.kase == ProductCase::Equal);
  CHECK(analysis.rk_g == 1);
  CHECK(analysis.rk_h == 1);
  CHECK(analysis.rk_product == 2);
  CHECK(analysis.verdict == ProductVerdict::AllConvexCombinations);
}

TEST_CASE("rank lower bounds hold on fixture pairs") {
  struct Pair { Graph g, h; };
  std::vector<Pair> pairs = {{complete(3), complete(4)}, {complete(3), cycle(5)},
                             {cycle(5), petersen()},     {cycle(4), cycle(6)},
                             {complete(2), complete(2)}};
  for (const auto& [g, h] : pairs) {
    auto analysis = rank_accounting(g, h);
    if (analysis.kase == ProductCase::LessThan)
      CHECK(analysis.rk_product_high >= analysis.rk_g);
    else
      CHECK(analysis.rk_product_high >= analysis.rk_g + analysis.rk_h);
  }
}

TEST_CASE("corollary pipeline certifies K_3 x K_4") {
  auto outcome = corollary_pipeline(complete(3), complete(4));
  CHECK(outcome.status == CorollaryStatus::Certified);
  CHECK(outcome.kase == ProductCase::LessThan);
  CHECK(outcome.product_corank == 2);
  CHECK(outcome.expected_corank == 2);
  CHECK(outcome.epsilon_used > 0.0);
  CHECK(outcome.product_dual_value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("corollary pipeline certifies the equal case petersen x petersen") {
  auto outcome = corollary_pipeline(petersen(), petersen());
  CHECK(outcome.status == CorollaryStatus::Certified);
  CHECK(outcome.kase == ProductCase::Equal);
  CHECK(outcome.product_corank == 8);
  CHECK(outcome.expected_corank == 8);
  CHECK(outcome.product_dual_value == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("corollary pipeline reports hypothesis failure for the pendant factor") {
  auto outcome = corollary_pipeline(k3_pendant(), complete(4));
  CHECK(outcome.status == CorollaryStatus::HypothesisNotMet);
  CHECK_FALSE(outcome.g_positive_diagonal);
}

TEST_CASE("necessary conditions flag the pendant factor") {
  auto report = necessary_conditions(k3_pendant(), complete(4));
  CHECK(report.kase == ProductCase::LessThan);
  REQUIRE(report.non_neighborly_g.size() == 1);
  CHECK(report.non_neighborly_g[0] == 3);
  CHECK_FALSE(report.conditions_met);
  CHECK(report.accounting_verdict != ProductVerdict::AllInducedByG);
  CHECK_FALSE(report.contradiction);
}

TEST_CASE("necessary conditions: disconnected skeletons block the equal case") {
  Graph two = disjoint_union(complete(3), complete(3));
  auto report = necessary_conditions(two, two);
  CHECK(report.kase == ProductCase::Equal);
  CHECK_FALSE(report.skeleton_g_connected);
  CHECK_FALSE(report.conditions_met);
  CHECK(report.accounting_verdict != ProductVerdict::AllConvexCombinations);
}

TEST_CASE("necessary conditions pass for complete factors") {
  auto report = necessary_conditions(complete(3), complete(5));
  CHECK(report.non_neighborly_g.empty());
  CHECK(report.skeleton_g_connected);
  CHECK(report.conditions_met);
  CHECK_FALSE(report.contradiction);
}

TEST_CASE("product dependencies from factor witnesses") {
  SUBCASE("K_3 x K_3: uniform coefficients 1/2 over four neighbors") {
    Graph g = complete(3);
    auto chi = chi_v(g);
    auto w0 = is_neighborly(chi.coloring, g, 0, 1e-6);
    REQUIRE(w0.has_value());
    auto dep = build_product_dependency(*w0, *w0, chi.coloring, chi.coloring, chi.t);
    CHECK(dep.vertex_flat == 0);
    CHECK(dep.coefficients.size() == 4);
    for (auto [flat, c] : dep.coefficients) CHECK(c == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(dep.residual <= 1e-7);
  }
  SUBCASE("K_2 x K_2: single product coefficient 1") {
    Graph g = complete(2);
    auto chi = chi_v(g);
    auto w0 = is_neighborly(chi.coloring, g, 0, 1e-6);
    REQUIRE(w0.has_value());
    auto dep = build_product_dependency(*w0, *w0, chi.coloring, chi.coloring, chi.t);
    REQUIRE(dep.coefficients.size() == 1);
    CHECK(dep.coefficients.begin()->second == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(dep.residual <= 1e-7);
  }
  SUBCASE("petersen x petersen residual") {
    Graph g = petersen();
    auto chi = chi_v(g);
    auto w0 = is_neighborly(chi.coloring, g, 0, 1e-6);
    auto w3 = is_neighborly(chi.coloring, g, 3, 1e-6);
    REQUIRE(w0.has_value());
    REQUIRE(w3.has_value());
    auto dep = build_product_dependency(*w0, *w3, chi.coloring, chi.coloring, chi.t);
    CHECK(dep.residual <= 1e-7);
  }
}

TEST_CASE("hedetniemi identity on random pairs") {
  std::mt19937 rng(99);
  auto random_graph = [&rng](int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() & 1u) edges.push_back({i, j});
    return Graph(n, edges);
  };
  for (int trial = 0; trial < 8; ++trial) {
    Graph g = random_graph(4 + static_cast<int>(rng() % 4));
    Graph h = random_graph(4 + static_cast<int>(rng() % 4));
    auto rep = verify_hedetniemi(g, h);
    CHECK(rep.identity_ok);
    if (rep.certificate_built) CHECK(rep.certificate_ok);
  }
}
