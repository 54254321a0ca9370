#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "vclab/commands.hpp"
#include "vclab/product.hpp"

using namespace vclab;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "vclab_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_graph(const Graph& g, const std::string& name) {
  fs::path path = work_dir() / name;
  if (name.size() > 4 && name.substr(name.size() - 4) == ".col")
    write_dimacs(g, path.string());
  else
    write_graph_json(g, path.string());
  return path.string();
}

}  // namespace

TEST_CASE("config validation") {
  RunConfig config;
  CHECK_NOTHROW(config.validate());
  config.params.solve_tol = 1e-3;  // violates solve_tol < rank_tol
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = RunConfig{};
  config.params.max_iterations = 5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  auto parsed = RunConfig::from_json({{"solve_tol", 1e-10}, {"max_iters", 50}, {"output", "text"}});
  CHECK(parsed.params.solve_tol == 1e-10);
  CHECK(parsed.params.max_iterations == 50);
  CHECK(parsed.output == "text");
  CHECK_THROWS(RunConfig::from_json({{"output", "yaml"}}));
}

TEST_CASE("config from environment file") {
  fs::path cfg = work_dir() / "config.json";
  std::ofstream(cfg.string()) << R"({"rank_tol": 1e-5, "parallel": true})";
  setenv("VC_LAB_CONFIG", cfg.string().c_str(), 1);
  auto config = RunConfig::from_environment();
  CHECK(config.params.rank_tol == 1e-5);
  CHECK(config.parallel);
  unsetenv("VC_LAB_CONFIG");
  CHECK_FALSE(RunConfig::from_environment().parallel);
}

TEST_CASE("deterministic json dump formats floats at 12 digits") {
  nlohmann::json doc = {{"b", 2.5}, {"a", 1}, {"c", {{"nested", 0.1}}}};
  std::string out = json_dump_deterministic(doc);
  CHECK(out.find("2.500000000000e+00") != std::string::npos);
  CHECK(out.find("1.000000000000e-01") != std::string::npos);
  CHECK(out.find("\"a\"") < out.find("\"b\""));  // sorted keys
}

TEST_CASE("cmd_chi on petersen") {
  std::string path = write_graph(kneser(5, 2), "petersen.json");
  auto cert = cmd_chi(path, false, RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["t"].get<double>() == doctest::Approx(2.5).epsilon(1e-7));
  CHECK(cert.results["rank_primal"].get<int>() == 4);
  CHECK(cert.results["strict_complementarity"].get<bool>());
  CHECK(cert.results["skeleton_edges"].size() == 15);
  CHECK(exit_code(cert) == 0);
}

TEST_CASE("cmd_chi reads dimacs and reports the strict value") {
  std::string path = write_graph(complete(4), "k4.col");
  auto cert = cmd_chi(path, true, RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["t"].get<double>() == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(cert.results["t_strict"].get<double>() == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("cmd_chi on the empty graph") {
  std::string path = write_graph(Graph(3), "empty3.json");
  auto cert = cmd_chi(path, false, RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["t"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(cert.results["rank_primal"].get<int>() == 0);
}

TEST_CASE("cmd_chi fails cleanly on bad input") {
  auto cert = cmd_chi((work_dir() / "missing.json").string(), false, RunConfig{});
  CHECK(cert.status == CertStatus::Failed);
  CHECK(exit_code(cert) == 1);
}

TEST_CASE("cmd_uvc distinguishes unique and non-unique inputs") {
  auto unique_cert = cmd_uvc(write_graph(complete(5), "k5.json"), RunConfig{});
  CHECK(unique_cert.status == CertStatus::Ok);
  CHECK(unique_cert.results["verdict"] == "unique");

  auto pend_cert = cmd_uvc(write_graph(Graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}), "k3p.json"), RunConfig{});
  CHECK(pend_cert.status == CertStatus::Ok);
  CHECK(pend_cert.results["verdict"] == "not_unique");
  CHECK(pend_cert.results["second_coloring_distance"].get<double>() > 1e-6);
}

TEST_CASE("cmd_skeleton flags the pendant vertex") {
  auto cert = cmd_skeleton(write_graph(Graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}), "k3p.json"), RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["skeleton_edges"].size() == 3);
  REQUIRE(cert.results["isolated_vertices"].size() == 1);
  CHECK(cert.results["isolated_vertices"][0].get<int>() == 3);
}

TEST_CASE("cmd_neighborly flags the pendant vertex") {
  auto cert = cmd_neighborly(write_graph(Graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}), "k3p.json"), true,
                             RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  REQUIRE(cert.results["non_neighborly"].size() == 1);
  CHECK(cert.results["non_neighborly"][0].get<int>() == 3);
}

TEST_CASE("cmd_product bundles the selected analyses") {
  std::string k3 = write_graph(complete(3), "k3.json");
  std::string k4 = write_graph(complete(4), "k4.json");
  ProductOptions opts;
  opts.verify_hedetniemi = true;
  opts.rank_accounting = true;
  opts.corollary = true;
  auto cert = cmd_product(k3, k4, opts, RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["hedetniemi"]["pass"].get<bool>());
  CHECK(cert.results["rank_accounting"]["verdict"] == "all_induced_by_G");
  CHECK(cert.results["corollary"]["status"] == "certified");
}

TEST_CASE("cmd_product decompose recovers alpha from a coloring file") {
  Graph g = complete(3);
  auto chi = chi_v(g);
  auto w = direct_sum(chi.coloring, chi.coloring, g, g, 0.3);
  nlohmann::json doc = {{"t", w.t}, {"gram", matrix_to_json(w.gram)}};
  fs::path path = work_dir() / "sum.json";
  std::ofstream(path.string()) << doc.dump();

  std::string k3 = write_graph(g, "k3.json");
  ProductOptions opts;
  opts.decompose_file = path.string();
  auto cert = cmd_product(k3, k3, opts, RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["decompose"]["decomposable"].get<bool>());
  CHECK(cert.results["decompose"]["alpha"].get<double>() == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("batch runs entries with per-entry isolation") {
  std::string k3 = write_graph(complete(3), "k3.json");
  nlohmann::json manifest = {{"entries",
                              {{{"command", "chi"}, {"inputs", {k3}}},
                               {{"command", "chi"}, {"inputs", {"no-such-file.json"}}},
                               {{"command", "skeleton"}, {"inputs", {k3}}}}}};
  fs::path path = work_dir() / "manifest.json";
  std::ofstream(path.string()) << manifest.dump();
  auto cert = cmd_batch(path.string(), RunConfig{});
  CHECK(cert.status == CertStatus::Failed);  // one entry failed
  CHECK(cert.results["count"].get<int>() == 3);
  CHECK(cert.results["failed"].get<int>() == 1);
  CHECK(cert.results["entries"][0]["status"] == "OK");
  CHECK(cert.results["entries"][1]["status"] == "FAILED");
  CHECK(cert.results["entries"][2]["status"] == "OK");
  CHECK(exit_code(cert) == 1);
}

TEST_CASE("empty batch is OK") {
  fs::path path = work_dir() / "empty_manifest.json";
  std::ofstream(path.string()) << R"({"entries": []})";
  auto cert = cmd_batch(path.string(), RunConfig{});
  CHECK(cert.status == CertStatus::Ok);
  CHECK(cert.results["count"].get<int>() == 0);
}

TEST_CASE("batch certificates are byte-identical across runs and parallel modes") {
  std::string k3 = write_graph(complete(3), "k3.json");
  std::string pet = write_graph(kneser(5, 2), "petersen.json");
  nlohmann::json manifest = {{"entries",
                              {{{"command", "chi"}, {"inputs", {pet}}},
                               {{"command", "uvc"}, {"inputs", {k3}}},
                               {{"command", "neighborly"}, {"inputs", {k3}}},
                               {{"command", "product"},
                                {"inputs", {k3, pet}},
                                {"flags", {"--verify-hedetniemi", "--rank-accounting"}}}}}};
  fs::path path = work_dir() / "det_manifest.json";
  std::ofstream(path.string()) << manifest.dump();

  auto first = cmd_batch(path.string(), RunConfig{});
  auto second = cmd_batch(path.string(), RunConfig{});
  CHECK(first.dump() == second.dump());

  RunConfig parallel;
  parallel.parallel = true;
  auto third = cmd_batch(path.string(), parallel);
  REQUIRE(third.results["entries"].size() == first.results["entries"].size());
  for (size_t k = 0; k < first.results["entries"].size(); ++k)
    CHECK(json_dump_deterministic(third.results["entries"][k]["results"]) ==
          json_dump_deterministic(first.results["entries"][k]["results"]));
}

TEST_CASE("text output renders without throwing") {
  std::string k3 = write_graph(complete(3), "k3.json");
  auto cert = cmd_chi(k3, false, RunConfig{});
  std::string text = cert.dump_text();
  CHECK(text.find("command: chi") != std::string::npos);
  CHECK(text.find("status: OK") != std::string::npos);
}
