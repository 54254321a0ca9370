#include "vclab/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vclab/linalg.hpp"

namespace vclab {

void Graph::check(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(std::string("graph: ") + msg);
}

Graph::Graph(int n, const std::vector<Edge>& edges) : n_(n), neighbors_(n) {
  check(n >= 0, "vertex count must be nonnegative");
  std::set<Edge> unique;
  for (auto [i, j] : edges) {
    check(i != j, "loops are not allowed");
    check(i >= 0 && i < n && j >= 0 && j < n, "vertex index out of range");
    if (i > j) std::swap(i, j);
    unique.insert({i, j});
  }
  edges_.assign(unique.begin(), unique.end());
  adj_.assign(static_cast<size_t>(n) * n, 0);
  for (auto [i, j] : edges_) {
    adj_[static_cast<size_t>(i) * n + j] = 1;
    adj_[static_cast<size_t>(j) * n + i] = 1;
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

bool Graph::adjacent(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("graph: vertex index");
  return adj_[static_cast<size_t>(i) * n_ + j] != 0;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (auto [i, j] : edges_) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

Graph complete(int m) {
  if (m < 1) throw std::invalid_argument("complete: need m >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) edges.push_back({i, j});
  return Graph(m, edges);
}

Graph cycle(int m) {
  if (m < 3) throw std::invalid_argument("cycle: need m >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) edges.push_back({i, (i + 1) % m});
  return Graph(m, edges);
}

Graph path(int m) {
  if (m < 1) throw std::invalid_argument("path: need m >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < m; ++i) edges.push_back({i, i + 1});
  return Graph(m, edges);
}

namespace {

// r-subsets of {0..n-1} in lexicographic order.
std::vector<std::uint64_t> subsets_of_size(int n, int r) {
  std::vector<std::uint64_t> out;
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    std::uint64_t mask = 0;
    for (int i : idx) mask |= (std::uint64_t{1} << i);
    out.push_back(mask);
    int k = r - 1;
    while (k >= 0 && idx[k] == n - r + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int i = k + 1; i < r; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

}  // namespace

Graph kneser(int n, int r) {
  if (r < 1 || n < 2 * r) throw std::invalid_argument("kneser: need 1 <= r and n >= 2r");
  auto sets = subsets_of_size(n, r);
  std::vector<Edge> edges;
  for (size_t i = 0; i < sets.size(); ++i)
    for (size_t j = i + 1; j < sets.size(); ++j)
      if ((sets[i] & sets[j]) == 0) edges.push_back({static_cast<int>(i), static_cast<int>(j)});
  return Graph(static_cast<int>(sets.size()), edges);
}

Graph hamming_h(int n, int k) {
  if (n < 1 || n > 30) throw std::invalid_argument("hamming_h: need 1 <= n <= 30");
  if (k < 1 || k % 2 != 0) throw std::invalid_argument("hamming_h: distance k must be even and positive");
  std::vector<std::uint32_t> verts;
  for (std::uint32_t s = 0; s < (1u << n); ++s)
    if (__builtin_popcount(s) % 2 == 0) verts.push_back(s);
  std::vector<Edge> edges;
  for (size_t i = 0; i < verts.size(); ++i)
    for (size_t j = i + 1; j < verts.size(); ++j)
      if (__builtin_popcount(verts[i] ^ verts[j]) == k)
        edges.push_back({static_cast<int>(i), static_cast<int>(j)});
  return Graph(static_cast<int>(verts.size()), edges);
}

Graph hypercube(int dim) {
  if (dim < 1 || dim > 20) throw std::invalid_argument("hypercube: need 1 <= dim <= 20");
  int n = 1 << dim;
  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v)
    for (int b = 0; b < dim; ++b) {
      int w = v ^ (1 << b);
      if (v < w) edges.push_back({v, w});
    }
  return Graph(n, edges);
}

Graph categorical_product(const Graph& g, const Graph& h) {
  int nh = h.vertex_count();
  std::vector<Edge> edges;
  for (auto [i, j] : g.edges())
    for (auto [l, k] : h.edges()) {
      // (i,l)~(j,k) and (i,k)~(j,l)
      edges.push_back({ProductIndex::from_pair(i, l, nh).flat, ProductIndex::from_pair(j, k, nh).flat});
      edges.push_back({ProductIndex::from_pair(i, k, nh).flat, ProductIndex::from_pair(j, l, nh).flat});
    }
  return Graph(g.vertex_count() * nh, edges);
}

Graph complement(const Graph& g) {
  int n = g.vertex_count();
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!g.adjacent(i, j)) edges.push_back({i, j});
  return Graph(n, edges);
}

Graph disjoint_union(const Graph& g, const Graph& h) {
  int off = g.vertex_count();
  std::vector<Edge> edges = g.edges();
  for (auto [i, j] : h.edges()) edges.push_back({i + off, j + off});
  return Graph(off + h.vertex_count(), edges);
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  int n = g.vertex_count();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<int> queue{s};
    comp[s] = id;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      out[id].push_back(v);
      for (int w : g.neighbors(v))
        if (comp[w] < 0) {
          comp[w] = id;
          queue.push_back(w);
        }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

bool is_bipartite(const Graph& g) {
  int n = g.vertex_count();
  std::vector<int> color(n, -1);
  for (int s = 0; s < n; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : g.neighbors(v)) {
        if (color[w] < 0) {
          color[w] = 1 - color[v];
          queue.push_back(w);
        } else if (color[w] == color[v]) {
          return false;
        }
      }
    }
  }
  return true;
}

bool is_empty(const Graph& g) { return g.edge_count() == 0; }

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("walk count overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("walk count overflow");
  return r;
}

}  // namespace

bool is_one_walk_regular(const Graph& g, int max_power) {
  int n = g.vertex_count();
  if (n == 0) throw std::invalid_argument("is_one_walk_regular: graph has no vertices");
  if (max_power <= 0) {
    auto dec = eig_sym(g.adjacency_matrix());
    max_power = 1;
    for (int i = 1; i < n; ++i)
      if (dec.eigenvalues[i - 1] - dec.eigenvalues[i] > 1e-7) ++max_power;
  }
  // Integer powers of the adjacency matrix; both Schur conditions checked per power.
  using IntMat = std::vector<std::int64_t>;
  auto at = [n](IntMat& m, int i, int j) -> std::int64_t& { return m[static_cast<size_t>(i) * n + j]; };
  IntMat power(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) at(power, i, i) = 1;
  for (int k = 0; k <= max_power; ++k) {
    std::int64_t diag = at(power, 0, 0);
    for (int i = 1; i < n; ++i)
      if (at(power, i, i) != diag) return false;
    if (g.has_edges()) {
      auto [e0, e1] = g.edges().front();
      std::int64_t walk = at(power, e0, e1);
      for (auto [i, j] : g.edges())
        if (at(power, i, j) != walk) return false;
    }
    if (k == max_power) break;
    IntMat next(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::int64_t sum = 0;
        for (int l : g.neighbors(j)) sum = checked_add(sum, checked_mul(at(power, i, l), 1));
        at(next, i, j) = sum;
      }
    power.swap(next);
  }
  return true;
}

int greedy_coloring_bound(const Graph& g) {
  int n = g.vertex_count();
  std::vector<int> color(n, -1);
  int used = 0;
  for (int v = 0; v < n; ++v) {
    std::set<int> taken;
    for (int w : g.neighbors(v))
      if (color[w] >= 0) taken.insert(color[w]);
    int c = 0;
    while (taken.count(c)) ++c;
    color[v] = c;
    used = std::max(used, c + 1);
  }
  if (n == 0) return 0;
  return used;
}

Graph read_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int n = -1;
  std::vector<Edge> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ss(line);
    char tag;
    ss >> tag;
    if (tag == 'p') {
      std::string fmt;
      int m;
      if (!(ss >> fmt >> n >> m)) throw std::runtime_error(path + ": malformed p line");
    } else if (tag == 'e') {
      int i, j;
      if (!(ss >> i >> j)) throw std::runtime_error(path + ": malformed e line");
      edges.push_back({i - 1, j - 1});
    }
  }
  if (n < 0) throw std::runtime_error(path + ": missing p line");
  return Graph(n, edges);
}

void write_dimacs(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "p edge " << g.vertex_count() << " " << g.edge_count() << "\n";
  for (auto [i, j] : g.edges()) out << "e " << i + 1 << " " << j + 1 << "\n";
}

Graph read_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  if (!doc.contains("n") || !doc.contains("edges"))
    throw std::runtime_error(path + ": expected {\"n\": int, \"edges\": [[i,j],...]}");
  int n = doc["n"].get<int>();
  std::vector<Edge> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2) throw std::runtime_error(path + ": malformed edge entry");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return Graph(n, edges);
}

void write_graph_json(const Graph& g, const std::string& path) {
  nlohmann::json doc;
  doc["n"] = g.vertex_count();
  auto edges = nlohmann::json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i, j});
  doc["edges"] = edges;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

Graph read_graph(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".col") return read_dimacs(path);
  return read_graph_json(path);
}

}  // namespace vclab
