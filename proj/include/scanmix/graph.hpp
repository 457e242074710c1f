#pragma once

#include <string>
#include <utility>
#include <vector>

namespace scanmix {

// Simple undirected graph on sites 0..n-1, adjacency kept sorted.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  int max_degree = 0;

  bool has_edge(int u, int v) const;
  int degree(int u) const { return static_cast<int>(adj[u].size()); }
  std::vector<std::pair<int, int>> edges() const;  // each as (u, v) with u < v
};

// Rejects self loops, duplicate edges and out of range endpoints.
Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges);

// Format: first line "n m", then m lines "u v". Anything else is an error;
// trailing tokens or extra lines are rejected rather than ignored.
Graph read_graph_file(const std::string& path);

}  // namespace scanmix
