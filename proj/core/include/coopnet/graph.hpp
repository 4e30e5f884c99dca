#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coopnet {

struct DegreeMoments {
  int n = 0;
  double mu1 = 0.0;  // mean degree
  double mu2 = 0.0;  // mean squared degree
};

/// Immutable simple undirected graph on nodes 0..n-1.
///
/// Neighbor lists are sorted ascending, duplicate input edges collapse to a
/// single edge, and self-loops are rejected. Instances never change after
/// construction and are safe to share across threads.
class Graph {
 public:
  using Edge = std::pair<int, int>;

  static Graph from_edge_list(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  std::int64_t edge_count() const {
    return static_cast<std::int64_t>(adjacency_.size()) / 2;
  }
  int degree(int x) const { return offsets_[x + 1] - offsets_[x]; }
  std::span<const int> neighbors(int x) const {
    return {adjacency_.data() + offsets_[x],
            adjacency_.data() + offsets_[x + 1]};
  }
  bool has_edge(int x, int y) const;

  /// All edges as (u, v) pairs with u < v, lexicographically sorted.
  std::vector<Edge> edges() const;

 private:
  Graph() = default;
  int n_ = 0;
  std::vector<int> offsets_;    // size n_ + 1
  std::vector<int> adjacency_;  // concatenated sorted neighbor lists
};

DegreeMoments degree_moments(const Graph& g);

/// p_x = sum over neighbors y of 1/(k_x k_y). Requires degree(x) >= 1.
double reciprocal_degree_weight(const Graph& g, int x);

bool is_connected(const Graph& g);

/// Connected component sizes, largest first.
std::vector<int> component_sizes(const Graph& g);

// Edge-list text format: header line "N M", then M lines "u v" with
// 0-indexed endpoints. Lines starting with '#' are ignored.
Graph read_edge_list(std::istream& in, const std::string& origin);
Graph read_edge_list_file(const std::string& path);
std::string to_edge_list(const Graph& g);
void write_edge_list_file(const Graph& g, const std::string& path);

}  // namespace coopnet
