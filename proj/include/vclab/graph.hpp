#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vclab {

using Edge = std::pair<int, int>;  // normalized so that first < second

/// Finite simple graph on vertices 0..n-1. Immutable after construction.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : n_(n), neighbors_(n) { check(n >= 0, "vertex count must be nonnegative"); }
  Graph(int n, const std::vector<Edge>& edges);

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return neighbors_.at(v); }
  int degree(int v) const { return static_cast<int>(neighbors_.at(v).size()); }

  bool adjacent(int i, int j) const;
  bool has_edges() const { return !edges_.empty(); }

  /// Dense 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency_matrix() const;

  bool operator==(const Graph& other) const { return n_ == other.n_ && edges_ == other.edges_; }
  bool operator!=(const Graph& other) const { return !(*this == other); }

 private:
  static void check(bool cond, const char* msg);

  int n_ = 0;
  std::vector<Edge> edges_;                 // sorted lexicographically
  std::vector<std::vector<int>> neighbors_; // sorted
  std::vector<char> adj_;                   // n*n lookup
};

/// Row-major product vertex index: flat = g_index * |V(H)| + h_index.
struct ProductIndex {
  int g_index = 0;
  int h_index = 0;
  int flat = 0;

  static ProductIndex from_pair(int g, int h, int h_count) { return {g, h, g * h_count + h}; }
  static ProductIndex from_flat(int flat, int h_count) {
    return {flat / h_count, flat % h_count, flat};
  }
};

// Named families.
Graph complete(int m);
Graph cycle(int m);
Graph path(int m);
Graph kneser(int n, int r);
Graph hamming_h(int n, int k);
Graph hypercube(int dim);

// Constructions.
Graph categorical_product(const Graph& g, const Graph& h);
Graph complement(const Graph& g);
Graph disjoint_union(const Graph& g, const Graph& h);

// Structure queries.
std::vector<std::vector<int>> connected_components(const Graph& g);
bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);
bool is_empty(const Graph& g);

/// Walk-regularity via exact integer walk counts: A^k o I and A^k o A must be
/// scalar multiples of I and A for k = 0..max_power. Pass max_power <= 0 to use
/// the number of distinct adjacency eigenvalues, which suffices.
bool is_one_walk_regular(const Graph& g, int max_power = 0);

/// First-fit coloring in vertex order; upper bound on the chromatic number.
int greedy_coloring_bound(const Graph& g);

// Readers/writers: DIMACS .col ("p edge n m" / "e i j", 1-based) and JSON
// {"n": int, "edges": [[i,j],...]} with 0-based indices.
Graph read_dimacs(const std::string& path);
void write_dimacs(const Graph& g, const std::string& path);
Graph read_graph_json(const std::string& path);
void write_graph_json(const Graph& g, const std::string& path);
/// Dispatches on extension: ".col" -> DIMACS, anything else -> JSON.
Graph read_graph(const std::string& path);

}  // namespace vclab
