#pragma once

#include <string>
#include <vector>

#include "vclab/certificate.hpp"

namespace vclab {

struct ProductOptions {
  bool verify_hedetniemi = false;
  bool rank_accounting = false;
  bool corollary = false;
  bool strict = false;
  std::string decompose_file;  // coloring JSON {"t": ..., "gram": [[...]]}
};

Certificate cmd_chi(const std::string& graph_file, bool strict, const RunConfig& config);
Certificate cmd_uvc(const std::string& graph_file, const RunConfig& config);
Certificate cmd_skeleton(const std::string& graph_file, const RunConfig& config);
Certificate cmd_neighborly(const std::string& graph_file, bool arrows, const RunConfig& config);
Certificate cmd_product(const std::string& graph_file_g, const std::string& graph_file_h,
                        const ProductOptions& options, const RunConfig& config);
/// Runs every manifest entry (in a worker pool when config.parallel) and
/// aggregates; one entry failing does not abort the rest.
Certificate cmd_batch(const std::string& manifest_file, const RunConfig& config);

int exit_code(const Certificate& cert);

}  // namespace vclab
