#include "coopnet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coopnet {

Graph Graph::from_edge_list(int n, std::vector<Edge> edges) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");

  for (auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw std::invalid_argument("edge (" + std::to_string(u) + ", " +
                                  std::to_string(v) + ") out of range for n=" +
                                  std::to_string(n));
    }
    if (u == v) {
      throw std::invalid_argument("self-loop at node " + std::to_string(u));
    }
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.n_ = n;
  std::vector<int> deg(n, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  g.offsets_.assign(n + 1, 0);
  for (int x = 0; x < n; ++x) g.offsets_[x + 1] = g.offsets_[x] + deg[x];
  g.adjacency_.resize(g.offsets_[n]);
  std::vector<int> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.adjacency_[cursor[u]++] = v;
    g.adjacency_[cursor[v]++] = u;
  }
  // Edges were sorted, so each neighbor list is already ascending.
  return g;
}

bool Graph::has_edge(int x, int y) const {
  auto nb = neighbors(x);
  return std::binary_search(nb.begin(), nb.end(), y);
}

std::vector<Graph::Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (int u = 0; u < n_; ++u) {
    for (int v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

DegreeMoments degree_moments(const Graph& g) {
  const int n = g.node_count();
  double sum = 0.0, sum_sq = 0.0;
  for (int x = 0; x < n; ++x) {
    const double k = g.degree(x);
    sum += k;
    sum_sq += k * k;
  }
  return {n, sum / n, sum_sq / n};
}

double reciprocal_degree_weight(const Graph& g, int x) {
  if (x < 0 || x >= g.node_count()) {
    throw std::invalid_argument("node index out of range");
  }
  const int kx = g.degree(x);
  if (kx == 0) {
    throw std::invalid_argument("p_x undefined for isolated node " +
                                std::to_string(x));
  }
  double px = 0.0;
  for (int y : g.neighbors(x)) {
    px += 1.0 / (static_cast<double>(kx) * g.degree(y));
  }
  return px;
}

std::vector<int> component_sizes(const Graph& g) {
  const int n = g.node_count();
  std::vector<int> sizes;
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    int size = 0;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      ++size;
      for (int y : g.neighbors(x)) {
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

bool is_connected(const Graph& g) {
  return component_sizes(g).front() == g.node_count();
}

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Graph read_edge_list(std::istream& in, const std::string& origin) {
  std::string line;
  int line_no = 0;
  long n = -1, m = -1;
  std::vector<Graph::Edge> edges;

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    if (n < 0) {
      if (!(fields >> n >> m) || n < 1 || m < 0) {
        parse_fail(origin, line_no, "expected header \"N M\"");
      }
      std::string extra;
      if (fields >> extra) parse_fail(origin, line_no, "trailing tokens after header");
      edges.reserve(static_cast<std::size_t>(m));
      continue;
    }
    long u, v;
    if (!(fields >> u >> v)) parse_fail(origin, line_no, "expected edge \"u v\"");
    std::string extra;
    if (fields >> extra) parse_fail(origin, line_no, "trailing tokens after edge");
    if (static_cast<long>(edges.size()) == m) {
      parse_fail(origin, line_no, "more edges than declared in header");
    }
    if (u < 0 || u >= n || v < 0 || v >= n) {
      parse_fail(origin, line_no, "edge endpoint out of range");
    }
    if (u == v) parse_fail(origin, line_no, "self-loop");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  if (n < 0) throw std::runtime_error(origin + ": missing header line");
  if (static_cast<long>(edges.size()) != m) {
    throw std::runtime_error(origin + ": header declares " + std::to_string(m) +
                             " edges, found " + std::to_string(edges.size()));
  }
  return Graph::from_edge_list(static_cast<int>(n), std::move(edges));
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_edge_list(in, path);
}

std::string to_edge_list(const Graph& g) {
  std::string out = std::to_string(g.node_count()) + " " +
                    std::to_string(g.edge_count()) + "\n";
  for (const auto& [u, v] : g.edges()) {
    out += std::to_string(u) + " " + std::to_string(v) + "\n";
  }
  return out;
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_edge_list(g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace coopnet
