#include "vclab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "vclab/product.hpp"
#include "vclab/structure.hpp"

namespace vclab {

namespace {

nlohmann::json graph_input(const std::string& path, const Graph& g) {
  std::ostringstream digest;
  digest << std::hex << graph_digest(g);
  return {{"path", path}, {"n", g.vertex_count()}, {"m", g.edge_count()}, {"digest", digest.str()}};
}

nlohmann::json tolerances_echo(const SolveParams& p) {
  return {{"solve_tol", p.solve_tol}, {"rank_tol", p.rank_tol}, {"tight_tol", p.tight_tol}};
}

Certificate failed_certificate(const std::string& command, const RunConfig& config,
                               const std::string& message) {
  Certificate cert;
  cert.command = command;
  cert.config = config;
  cert.status = CertStatus::Failed;
  cert.results = {{"error", message}};
  return cert;
}

nlohmann::json chi_fragment(const ChiResult& chi, const Graph& g, const SolveParams& params) {
  auto sc = strict_complementarity(chi.coloring, chi.witness, params.rank_tol);
  auto skel = skeleton(chi, g, params.tight_tol);
  return {{"t", chi.t},
          {"dual_value", chi.dual_value},
          {"rank_primal", sc.rank_primal},
          {"corank_dual", chi.witness.corank},
          {"rank_dual", sc.rank_dual},
          {"strict_complementarity", sc.verdict},
          {"tight_edges", edges_to_json(chi.coloring.tight_edges)},
          {"skeleton_edges", edges_to_json(skel.graph.edges())},
          {"skeleton_witness_contained", skel.dual_support_contained},
          {"iterations", chi.iterations},
          {"gap", chi.gap},
          {"primal_residual", chi.primal_residual},
          {"dual_residual", chi.dual_residual},
          {"tolerances", tolerances_echo(params)}};
}

const char* verdict_name(ProductVerdict v) {
  switch (v) {
    case ProductVerdict::AllInducedByG: return "all_induced_by_G";
    case ProductVerdict::AllConvexCombinations: return "all_convex_combinations";
    case ProductVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace

Certificate cmd_chi(const std::string& graph_file, bool strict, const RunConfig& config) {
  try {
    Graph g = read_graph(graph_file);
    Certificate cert;
    cert.command = "chi";
    cert.config = config;
    cert.inputs = {{"graph", graph_input(graph_file, g)}};
    auto chi = chi_v(g, config.params);
    cert.results = chi_fragment(chi, g, config.params);
    if (strict) cert.results["t_strict"] = chi_sv(g, config.params).t;
    cert.status = CertStatus::Ok;
    return cert;
  } catch (const std::exception& e) {
    return failed_certificate("chi", config, e.what());
  }
}

Certificate cmd_uvc(const std::string& graph_file, const RunConfig& config) {
  try {
    Graph g = read_graph(graph_file);
    Certificate cert;
    cert.command = "uvc";
    cert.config = config;
    cert.inputs = {{"graph", graph_input(graph_file, g)}};
    auto chi = chi_v(g, config.params);
    auto uvc = uvc_check(chi, g, config.params);
    cert.results = {{"verdict", uvc.unique ? "unique" : "not_unique"},
                    {"via_kernel", uvc.via_kernel},
                    {"marginal", uvc.marginal},
                    {"t", chi.t},
                    {"tolerances", tolerances_echo(config.params)}};
    if (uvc.certificate) {
      const auto& r = *uvc.certificate;
      cert.results["r_matrix"] = matrix_to_json(r.r);
      cert.results["equality_residual"] = r.equality_residual;
      cert.results["epsilon_max"] = r.epsilon_max;
      auto second = second_coloring(chi.coloring, g, r, config.params);
      cert.results["second_coloring_distance"] = (second.gram - chi.coloring.gram).norm();
    }
    cert.status = CertStatus::Ok;
    return cert;
  } catch (const std::exception& e) {
    return failed_certificate("uvc", config, e.what());
  }
}

Certificate cmd_skeleton(const std::string& graph_file, const RunConfig& config) {
  try {
    Graph g = read_graph(graph_file);
    Certificate cert;
    cert.command = "skeleton";
    cert.config = config;
    cert.inputs = {{"graph", graph_input(graph_file, g)}};
    auto chi = chi_v(g, config.params);
    auto skel = skeleton(chi, g, config.params.tight_tol);
    std::vector<int> isolated;
    for (int v = 0; v < skel.graph.vertex_count(); ++v)
      if (skel.graph.degree(v) == 0) isolated.push_back(v);
    cert.results = {{"t", chi.t},
                    {"skeleton_edges", edges_to_json(skel.graph.edges())},
                    {"isolated_vertices", isolated},
                    {"dual_support_contained", skel.dual_support_contained},
                    {"tolerances", tolerances_echo(config.params)}};
    cert.status = CertStatus::Ok;
    return cert;
  } catch (const std::exception& e) {
    return failed_certificate("skeleton", config, e.what());
  }
}

Certificate cmd_neighborly(const std::string& graph_file, bool arrows, const RunConfig& config) {
  try {
    Graph g = read_graph(graph_file);
    Certificate cert;
    cert.command = "neighborly";
    cert.config = config;
    cert.inputs = {{"graph", graph_input(graph_file, g)}};
    auto chi = chi_v(g, config.params);
    auto vertices = nlohmann::json::array();
    std::vector<int> non_neighborly;
    for (int v = 0; v < g.vertex_count(); ++v) {
      auto witness = is_neighborly(chi.coloring, g, v, config.params.tight_tol);
      nlohmann::json entry = {{"vertex", v}, {"neighborly", witness.has_value()}};
      if (witness) {
        nlohmann::json coeffs = nlohmann::json::object();
        for (auto [j, c] : witness->coefficients) coeffs[std::to_string(j)] = c;
        entry["coefficients"] = coeffs;
        entry["residual"] = witness->residual;
        if (arrows) {
          auto d = arrow_set(chi.coloring, g, v, config.params.tight_tol);
          entry["arrows"] = std::vector<int>(d.begin(), d.end());
        }
      } else {
        non_neighborly.push_back(v);
      }
      vertices.push_back(entry);
    }
    cert.results = {{"t", chi.t},
                    {"vertices", vertices},
                    {"non_neighborly", non_neighborly},
                    {"tolerances", tolerances_echo(config.params)}};
    cert.status = CertStatus::Ok;
    return cert;
  } catch (const std::exception& e) {
    return failed_certificate("neighborly", config, e.what());
  }
}

Certificate cmd_product(const std::string& graph_file_g, const std::string& graph_file_h,
                        const ProductOptions& options, const RunConfig& config) {
  try {
    Graph g = read_graph(graph_file_g);
    Graph h = read_graph(graph_file_h);
    Certificate cert;
    cert.command = "product";
    cert.config = config;
    cert.inputs = {{"graph_g", graph_input(graph_file_g, g)}, {"graph_h", graph_input(graph_file_h, h)}};
    cert.results = {{"tolerances", tolerances_echo(config.params)}};
    bool inconclusive = false;

    if (options.verify_hedetniemi) {
      auto rep = verify_hedetniemi(g, h, config.params, options.strict);
      nlohmann::json frag = {{"chi_g", rep.chi_g},
                             {"chi_h", rep.chi_h},
                             {"chi_product", rep.chi_product},
                             {"min_value", rep.min_value},
                             {"identity_error", rep.identity_error},
                             {"certificate_built", rep.certificate_built},
                             {"pass", rep.pass}};
      if (rep.certificate_built) {
        frag["certificate_lambda_min"] = rep.certificate_lambda_min;
        frag["certificate_value"] = rep.certificate_value;
      }
      if (rep.strict_checked) {
        frag["strict_g"] = rep.strict_g;
        frag["strict_h"] = rep.strict_h;
        frag["strict_product"] = rep.strict_product;
        frag["strict_error"] = rep.strict_error;
      }
      cert.results["hedetniemi"] = frag;
      if (!rep.pass) cert.status = CertStatus::Failed;
    }

    if (options.rank_accounting) {
      auto a = rank_accounting(g, h, config.params);
      cert.results["rank_accounting"] = {
          {"case", a.kase == ProductCase::Equal ? "equal" : "less_than"},
          {"swapped", a.swapped},
          {"chi", {{"g", a.chi_g}, {"h", a.chi_h}, {"product", a.chi_product}}},
          {"rk",
           {{"g", a.rk_g},
            {"h", a.rk_h},
            {"product", a.rk_product},
            {"product_certified", a.rk_product_certified},
            {"bracket", {a.rk_product_low, a.rk_product_high}}}},
          {"verdict", verdict_name(a.verdict)},
          {"min_residual", a.min_residual}};
      if (a.verdict == ProductVerdict::Inconclusive) inconclusive = true;
    }

    if (options.corollary) {
      auto c = corollary_pipeline(g, h, config.params);
      const char* status = c.status == CorollaryStatus::Certified          ? "certified"
                           : c.status == CorollaryStatus::HypothesisNotMet ? "hypothesis not met"
                                                                           : "construction failed";
      cert.results["corollary"] = {
          {"status", status},
          {"case", c.kase == ProductCase::Equal ? "equal" : "less_than"},
          {"swapped", c.swapped},
          {"hypothesis",
           {{"g_strictly_complementary", c.g_strictly_complementary},
            {"g_positive_diagonal", c.g_positive_diagonal},
            {"g_connected_dual", c.g_connected_dual},
            {"h_strictly_complementary", c.h_strictly_complementary},
            {"h_connected_dual", c.h_connected_dual},
            {"h_connected_graph", c.h_connected_graph}}},
          {"construction",
           {{"epsilon", c.epsilon_used},
            {"product_dual_value", c.product_dual_value},
            {"product_corank", c.product_corank},
            {"expected_corank", c.expected_corank}}},
          {"reason", c.failure_reason}};
      if (c.status != CorollaryStatus::Certified) inconclusive = true;
    }

    if (!options.decompose_file.empty()) {
      std::ifstream in(options.decompose_file);
      if (!in) throw std::runtime_error("cannot open " + options.decompose_file);
      nlohmann::json doc;
      in >> doc;
      Matrix gram = matrix_from_json(doc.at("gram"));
      double t = doc.at("t").get<double>();
      auto dec = convex_decompose(gram, g, h, t, config.params.tight_tol);
      nlohmann::json frag = {{"decomposable", dec.has_value()}};
      if (dec) {
        frag["alpha"] = dec->alpha;
        frag["fit_residual"] = dec->fit_residual;
      }
      cert.results["decompose"] = frag;
    }

    if (cert.status == CertStatus::Ok && inconclusive) cert.status = CertStatus::Inconclusive;
    return cert;
  } catch (const std::exception& e) {
    return failed_certificate("product", config, e.what());
  }
}

namespace {

Certificate run_entry(const nlohmann::json& entry, const RunConfig& config) {
  std::string command = entry.at("command").get<std::string>();
  std::vector<std::string> inputs;
  if (entry.contains("inputs"))
    for (const auto& p : entry["inputs"]) inputs.push_back(p.get<std::string>());
  std::vector<std::string> flags;
  if (entry.contains("flags"))
    for (const auto& f : entry["flags"]) flags.push_back(f.get<std::string>());
  auto has_flag = [&flags](const std::string& name) {
    return std::find(flags.begin(), flags.end(), name) != flags.end();
  };

  if (command == "chi") {
    if (inputs.size() != 1) return failed_certificate("chi", config, "chi expects one input");
    return cmd_chi(inputs[0], has_flag("--strict"), config);
  }
  if (command == "uvc") {
    if (inputs.size() != 1) return failed_certificate("uvc", config, "uvc expects one input");
    return cmd_uvc(inputs[0], config);
  }
  if (command == "skeleton") {
    if (inputs.size() != 1) return failed_certificate("skeleton", config, "skeleton expects one input");
    return cmd_skeleton(inputs[0], config);
  }
  if (command == "neighborly") {
    if (inputs.size() != 1) return failed_certificate("neighborly", config, "neighborly expects one input");
    return cmd_neighborly(inputs[0], has_flag("--arrows"), config);
  }
  if (command == "product") {
    if (inputs.size() != 2) return failed_certificate("product", config, "product expects two inputs");
    ProductOptions opts;
    opts.verify_hedetniemi = has_flag("--verify-hedetniemi");
    opts.rank_accounting = has_flag("--rank-accounting");
    opts.corollary = has_flag("--corollary");
    opts.strict = has_flag("--strict");
    if (entry.contains("decompose")) opts.decompose_file = entry["decompose"].get<std::string>();
    return cmd_product(inputs[0], inputs[1], opts, config);
  }
  return failed_certificate(command, config, "unknown command");
}

}  // namespace

Certificate cmd_batch(const std::string& manifest_file, const RunConfig& config) {
  Certificate cert;
  cert.command = "batch";
  cert.config = config;
  try {
    std::ifstream in(manifest_file);
    if (!in) throw std::runtime_error("cannot open " + manifest_file);
    nlohmann::json manifest;
    in >> manifest;
    const auto& entries = manifest.contains("entries") ? manifest["entries"] : manifest;
    if (!entries.is_array()) throw std::runtime_error("manifest must contain an entry array");

    std::vector<nlohmann::json> entry_list(entries.begin(), entries.end());
    std::vector<Certificate> outcomes(entry_list.size());
    if (config.parallel && entry_list.size() > 1) {
      std::atomic<size_t> next{0};
      unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                            static_cast<unsigned>(entry_list.size()));
      if (workers == 0) workers = 1;
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
          while (true) {
            size_t k = next.fetch_add(1);
            if (k >= entry_list.size()) break;
            outcomes[k] = run_entry(entry_list[k], config);
          }
        });
      for (auto& th : pool) th.join();
    } else {
      for (size_t k = 0; k < entry_list.size(); ++k) outcomes[k] = run_entry(entry_list[k], config);
    }

    auto arr = nlohmann::json::array();
    int failed = 0, inconclusive = 0;
    for (const auto& outcome : outcomes) {
      arr.push_back(outcome.to_json());
      if (outcome.status == CertStatus::Failed) ++failed;
      if (outcome.status == CertStatus::Inconclusive) ++inconclusive;
    }
    cert.inputs = {{"manifest", manifest_file}};
    cert.results = {{"entries", arr},
                    {"count", static_cast<int>(outcomes.size())},
                    {"failed", failed},
                    {"inconclusive", inconclusive}};
    cert.status = failed > 0 ? CertStatus::Failed : CertStatus::Ok;
    return cert;
  } catch (const std::exception& e) {
    return failed_certificate("batch", config, e.what());
  }
}

int exit_code(const Certificate& cert) { return cert.status == CertStatus::Failed ? 1 : 0; }

}  // namespace vclab
