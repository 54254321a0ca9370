#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "vclab/coloring.hpp"
#include "vclab/graph.hpp"

namespace vclab {

inline constexpr const char* kToolVersion = "0.1.0";

enum class CertStatus { Ok, Failed, Inconclusive };

std::string to_string(CertStatus status);

/// Tolerances and output options shared by every command.
struct RunConfig {
  SolveParams params;
  std::string output = "json";  // "json" | "text"
  bool parallel = false;

  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& doc);
  /// Defaults, overridden by the JSON file named in VC_LAB_CONFIG when set.
  static RunConfig from_environment();
};

/// Serializable verdict bundle. Serialization is deterministic: keys sorted,
/// floats rendered with a fixed %.12e format.
struct Certificate {
  std::string command;
  nlohmann::json inputs;
  RunConfig config;
  nlohmann::json results;
  CertStatus status = CertStatus::Ok;

  nlohmann::json to_json() const;
  std::string dump() const;
  std::string dump_text() const;
};

/// Deterministic JSON rendering (sorted keys, fixed float format).
std::string json_dump_deterministic(const nlohmann::json& doc, int indent = 2);

/// FNV-1a digest of the labeled graph, used to tie certificates to inputs.
std::uint64_t graph_digest(const Graph& g);

nlohmann::json edges_to_json(const std::vector<Edge>& edges);
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& doc);

}  // namespace vclab
