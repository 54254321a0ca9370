#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vclab/commands.hpp"

namespace {

void emit(const vclab::Certificate& cert, const vclab::RunConfig& config) {
  if (config.output == "text")
    std::cout << cert.dump_text();
  else
    std::cout << cert.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vector chromatic number laboratory"};
  app.require_subcommand(1);

  vclab::RunConfig config;
  try {
    config = vclab::RunConfig::from_environment();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  app.add_option("--solve-tol", config.params.solve_tol, "interior-point convergence tolerance");
  app.add_option("--rank-tol", config.params.rank_tol, "relative eigenvalue threshold for ranks");
  app.add_option("--tight-tol", config.params.tight_tol, "tightness threshold on Gram entries");
  app.add_option("--max-iters", config.params.max_iterations, "interior-point iteration cap");
  app.add_option("--output", config.output, "json or text");
  app.add_flag("--parallel", config.parallel, "run batch entries in a worker pool");

  std::string graph_file, graph_file_h, manifest_file;
  bool strict = false, arrows = false;
  vclab::ProductOptions product_options;

  auto* chi = app.add_subcommand("chi", "vector chromatic number with rank and skeleton data");
  chi->add_option("graph", graph_file, "graph file (.json or .col)")->required();
  chi->add_flag("--strict", strict, "also compute the strict variant");

  auto* uvc = app.add_subcommand("uvc", "unique vector colorability check");
  uvc->add_option("graph", graph_file, "graph file")->required();

  auto* skel = app.add_subcommand("skeleton", "skeleton of the graph");
  skel->add_option("graph", graph_file, "graph file")->required();

  auto* nbr = app.add_subcommand("neighborly", "per-vertex neighborliness witnesses");
  nbr->add_option("graph", graph_file, "graph file")->required();
  nbr->add_flag("--arrows", arrows, "also compute arrow sets");

  auto* product = app.add_subcommand("product", "categorical-product analyses");
  product->add_option("graph_g", graph_file, "first factor")->required();
  product->add_option("graph_h", graph_file_h, "second factor")->required();
  product->add_flag("--verify-hedetniemi", product_options.verify_hedetniemi,
                    "check the product minimum identity with a Kronecker dual certificate");
  product->add_flag("--rank-accounting", product_options.rank_accounting,
                    "rank bookkeeping for the product theorems");
  product->add_flag("--corollary", product_options.corollary, "explicit product dual construction");
  product->add_flag("--strict", product_options.strict, "also spot-check the strict variant");
  product->add_option("--decompose", product_options.decompose_file,
                      "coloring JSON file to split into induced parts");

  auto* batch = app.add_subcommand("batch", "run a manifest of commands");
  batch->add_option("manifest", manifest_file, "manifest JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  vclab::Certificate cert;
  if (chi->parsed())
    cert = vclab::cmd_chi(graph_file, strict, config);
  else if (uvc->parsed())
    cert = vclab::cmd_uvc(graph_file, config);
  else if (skel->parsed())
    cert = vclab::cmd_skeleton(graph_file, config);
  else if (nbr->parsed())
    cert = vclab::cmd_neighborly(graph_file, arrows, config);
  else if (product->parsed())
    cert = vclab::cmd_product(graph_file, graph_file_h, product_options, config);
  else if (batch->parsed())
    cert = vclab::cmd_batch(manifest_file, config);

  emit(cert, config);
  return vclab::exit_code(cert);
}
