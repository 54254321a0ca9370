#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vclab/structure.hpp"

using namespace vclab;

namespace {

Graph k3_pendant() { return Graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}); }

Graph petersen() { return kneser(5, 2); }

Graph two_triangles() { return disjoint_union(complete(3), complete(3)); }

}  // namespace

TEST_CASE("every vertex of K_m is neighborly with uniform weights") {
  for (int m : {3, 5}) {
    auto chi = chi_v(complete(m));
    for (int v = 0; v < m; ++v) {
      auto w = is_neighborly(chi.coloring, complete(m), v, 1e-6);
      REQUIRE(w.has_value());
      CHECK(w->residual <= 1e-6);
      for (auto [j, c] : w->coefficients) CHECK(c == doctest::Approx(1.0 / m).epsilon(1e-5));
      double sum = 0.0;
      for (auto [j, c] : w->coefficients) sum += c;
      CHECK(sum == doctest::Approx(chi.t * w->coefficients[v]).epsilon(1e-6));
    }
  }
}

TEST_CASE("pendant vertex is not neighborly, triangle vertices are") {
  Graph g = k3_pendant();
  auto chi = chi_v(g);
  CHECK_FALSE(is_neighborly(chi.coloring, g, 3, 1e-6).has_value());
  for (int v = 0; v < 3; ++v) CHECK(is_neighborly(chi.coloring, g, v, 1e-6).has_value());
}

TEST_CASE("bipartite vertices are neighborly through their antipode") {
  Graph g = cycle(6);
  auto chi = chi_v(g);
  for (int v = 0; v < 6; ++v) {
    auto w = is_neighborly(chi.coloring, g, v, 1e-6);
    REQUIRE(w.has_value());
    CHECK(w->coefficients[v] == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("neighborliness agrees with skeleton isolation on fixtures") {
  for (const Graph& g : {k3_pendant(), complete(4), cycle(5), cycle(6), petersen(),
                         Graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}})}) {
    auto chi = chi_v(g);
    auto skel = skeleton(chi, g, 1e-6);
    for (int v = 0; v < g.vertex_count(); ++v) {
      bool nbrly = is_neighborly(chi.coloring, g, v, 1e-6).has_value();
      CHECK(nbrly == (skel.graph.degree(v) > 0));
    }
  }
}

TEST_CASE("forced coefficient identity on every neighborly fixture vertex") {
  for (const Graph& g : {complete(4), cycle(5), cycle(6), petersen()}) {
    auto chi = chi_v(g);
    for (int v = 0; v < g.vertex_count(); ++v) {
      auto w = is_neighborly(chi.coloring, g, v, 1e-6);
      REQUIRE(w.has_value());
      double sum = 0.0;
      for (auto [j, c] : w->coefficients) sum += c;
      CHECK(std::abs(sum - chi.t * w->coefficients[v]) <= 1e-6);
    }
  }
}

TEST_CASE("arrow sets on complete graphs cover the whole neighborhood") {
  Graph g = complete(4);
  auto chi = chi_v(g);
  for (int v = 0; v < 4; ++v) {
    auto d = arrow_set(chi.coloring, g, v, 1e-6);
    CHECK(d.size() == 3);
    CHECK(d.count(v) == 0);
  }
}

TEST_CASE("arrow set of K_2 is the single neighbor") {
  Graph g = complete(2);
  auto chi = chi_v(g);
  auto d = arrow_set(chi.coloring, g, 0, 1e-6);
  REQUIRE(d.size() == 1);
  CHECK(d.count(1) == 1);
}

TEST_CASE("arrow set regression fixture on C_4") {
  // The max-rank coloring of C_4 is the rank-1 antipodal one, so both tight
  // neighbors of vertex 0 carry weight in some dependency.
  Graph g = cycle(4);
  auto chi = chi_v(g);
  CHECK(numeric_rank(chi.coloring.gram) == 1);
  auto d = arrow_set(chi.coloring, g, 0, 1e-6);
  CHECK(d == std::set<int>{1, 3});
}

TEST_CASE("arrow_set rejects non-neighborly vertices") {
  Graph g = k3_pendant();
  auto chi = chi_v(g);
  CHECK_THROWS_AS(arrow_set(chi.coloring, g, 3, 1e-6), std::invalid_argument);
}

TEST_CASE("cone-span property: arrow differences span the coloring space") {
  for (const Graph& g : {complete(4), complete(5), petersen()}) {
    auto chi = chi_v(g);
    const Matrix& p = chi.coloring.factors;
    const int d = static_cast<int>(p.cols());
    std::vector<Vector> diffs;
    for (int v = 0; v < g.vertex_count(); ++v)
      for (int j : arrow_set(chi.coloring, g, v, 1e-6))
        diffs.push_back(p.row(v).transpose() - p.row(j).transpose());
    Matrix stacked(static_cast<int>(diffs.size()), d);
    for (size_t r = 0; r < diffs.size(); ++r) stacked.row(static_cast<int>(r)) = diffs[r].transpose();
    CHECK(numeric_rank(stacked.transpose() * stacked) == d);
  }
}

TEST_CASE("uvc: complete graphs are uniquely vector colorable") {
  for (int m = 2; m <= 6; ++m) {
    auto res = uvc_check(complete(m));
    CHECK(res.unique);
    CHECK_FALSE(res.certificate.has_value());
  }
}

TEST_CASE("uvc: K_3 + pendant is not unique and yields a second coloring") {
  Graph g = k3_pendant();
  auto chi = chi_v(g);
  auto res = uvc_check(chi, g);
  REQUIRE_FALSE(res.unique);
  REQUIRE(res.certificate.has_value());
  auto second = second_coloring(chi.coloring, g, *res.certificate);
  CHECK((second.gram - chi.coloring.gram).norm() > 1e-6);
  CHECK(second.t == doctest::Approx(chi.t));
  for (int i = 0; i < 4; ++i) CHECK(second.gram(i, i) == doctest::Approx(chi.t - 1.0).epsilon(1e-6));
  for (auto [i, j] : g.edges()) CHECK(second.gram(i, j) <= -1.0 + 1e-6);
  CHECK(cholesky_psd(second.gram, 1e-7).ok);
}

TEST_CASE("uvc: disjoint triangles fail through the equality kernel") {
  Graph g = two_triangles();
  auto chi = chi_v(g);
  auto res = uvc_check(chi, g);
  REQUIRE_FALSE(res.unique);
  CHECK(res.via_kernel);
  REQUIRE(res.certificate.has_value());
  auto second = second_coloring(chi.coloring, g, *res.certificate);
  CHECK((second.gram - chi.coloring.gram).norm() > 1e-6);
}

TEST_CASE("uvc: petersen and odd cycles are unique") {
  CHECK(uvc_check(petersen()).unique);
  CHECK(uvc_check(cycle(5)).unique);
  CHECK(uvc_check(cycle(7)).unique);
}

TEST_CASE("uvc: bipartite connected fixtures are unique") {
  CHECK(uvc_check(cycle(4)).unique);
  CHECK(uvc_check(cycle(6)).unique);
  CHECK(uvc_check(complement(two_triangles())).unique);  // K_{3,3}
}

TEST_CASE("second_coloring rejects a zero perturbation") {
  Graph g = k3_pendant();
  auto chi = chi_v(g);
  RPerturbation zero;
  zero.r = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(second_coloring(chi.coloring, g, zero), std::invalid_argument);
}

TEST_CASE("uvc certificates satisfy the stated residual bounds") {
  for (const Graph& g : {k3_pendant(), two_triangles()}) {
    auto chi = chi_v(g);
    auto res = uvc_check(chi, g);
    REQUIRE(res.certificate.has_value());
    const auto& cert = *res.certificate;
    CHECK(cert.equality_residual <= 1e-7);
    for (auto& [e, v] : cert.tight_edge_values) CHECK(v <= 1e-7);
    CHECK(cert.epsilon_max > 0.0);
    CHECK(std::abs(cert.r.norm() - 1.0) <= 1e-10);
  }
}
