#include "vclab/certificate.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vclab {

std::string to_string(CertStatus status) {
  switch (status) {
    case CertStatus::Ok: return "OK";
    case CertStatus::Failed: return "FAILED";
    case CertStatus::Inconclusive: return "INCONCLUSIVE";
  }
  return "FAILED";
}

void RunConfig::validate() const {
  if (!(params.solve_tol > 0.0 && params.solve_tol < params.rank_tol && params.rank_tol < 1.0))
    throw std::invalid_argument("config: need 0 < solve_tol < rank_tol < 1");
  if (!(params.tight_tol > 0.0 && params.tight_tol < 1.0))
    throw std::invalid_argument("config: need 0 < tight_tol < 1");
  if (params.max_iterations < 10) throw std::invalid_argument("config: need max_iters >= 10");
  if (output != "json" && output != "text") throw std::invalid_argument("config: output must be json or text");
}

nlohmann::json RunConfig::to_json() const {
  return {{"solve_tol", params.solve_tol}, {"rank_tol", params.rank_tol},
          {"tight_tol", params.tight_tol}, {"max_iters", params.max_iterations},
          {"output", output},              {"parallel", parallel}};
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  RunConfig cfg;
  if (doc.contains("solve_tol")) cfg.params.solve_tol = doc["solve_tol"].get<double>();
  if (doc.contains("rank_tol")) cfg.params.rank_tol = doc["rank_tol"].get<double>();
  if (doc.contains("tight_tol")) cfg.params.tight_tol = doc["tight_tol"].get<double>();
  if (doc.contains("max_iters")) cfg.params.max_iterations = doc["max_iters"].get<int>();
  if (doc.contains("output")) cfg.output = doc["output"].get<std::string>();
  if (doc.contains("parallel")) cfg.parallel = doc["parallel"].get<bool>();
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_environment() {
  const char* path = std::getenv("VC_LAB_CONFIG");
  if (!path || !*path) return RunConfig{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("VC_LAB_CONFIG: cannot open ") + path);
  nlohmann::json doc;
  in >> doc;
  return from_json(doc);
}

namespace {

void dump_value(const nlohmann::json& v, std::string& out, int indent, int depth) {
  auto pad = [&](int d) { out.append(static_cast<size_t>(d) * indent, ' '); };
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // nlohmann::json keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent, depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        dump_value(item, out, indent, depth + 1);
      }
      out += "\n";
      pad(depth);
      out += "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.12e", v.get<double>());
      out += buf;
      return;
    }
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string json_dump_deterministic(const nlohmann::json& doc, int indent) {
  std::string out;
  dump_value(doc, out, indent, 0);
  out += "\n";
  return out;
}

std::uint64_t graph_digest(const Graph& g) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      hash ^= (v >> (8 * b)) & 0xff;
      hash *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(g.vertex_count()));
  for (auto [i, j] : g.edges()) {
    mix(static_cast<std::uint64_t>(i));
    mix(static_cast<std::uint64_t>(j));
  }
  return hash;
}

nlohmann::json Certificate::to_json() const {
  nlohmann::json doc;
  doc["command"] = command;
  doc["inputs"] = inputs;
  doc["config"] = config.to_json();
  doc["results"] = results;
  doc["status"] = to_string(status);
  doc["version"] = kToolVersion;
  return doc;
}

std::string Certificate::dump() const { return json_dump_deterministic(to_json()); }

namespace {

void dump_text_value(const nlohmann::json& v, const std::string& prefix, std::string& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      dump_text_value(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (v.is_array()) {
    out += prefix + ": " + v.dump() + "\n";
  } else if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v.get<double>());
    out += prefix + ": " + buf + "\n";
  } else {
    out += prefix + ": " + v.dump() + "\n";
  }
}

}  // namespace

std::string Certificate::dump_text() const {
  std::string out = "command: " + command + "\nstatus: " + to_string(status) + "\n";
  dump_text_value(results, "", out);
  return out;
}

nlohmann::json edges_to_json(const std::vector<Edge>& edges) {
  auto arr = nlohmann::json::array();
  for (auto [i, j] : edges) arr.push_back({i, j});
  return arr;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.empty()) throw std::invalid_argument("matrix_from_json: expected array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(doc.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(doc[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(doc[i].size()) != cols)
      throw std::invalid_argument("matrix_from_json: ragged rows");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = doc[i][j].get<double>();
  }
  return m;
}

}  // namespace vclab
