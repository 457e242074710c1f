#include "scanmix/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "scanmix/errors.hpp"

namespace scanmix {

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || u >= n || v < 0 || v >= n) return false;
  return std::binary_search(adj[u].begin(), adj[u].end(), v);
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n <= 0) fail(Errc::ParamOutOfRange, "graph needs at least one site");
  Graph g;
  g.n = n;
  g.adj.assign(n, {});
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      fail(Errc::IndexOutOfRange, "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    if (u == v) fail(Errc::SelfLoop, "site " + std::to_string(u));
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (int u = 0; u < n; ++u) {
    auto& a = g.adj[u];
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end())
      fail(Errc::DuplicateEdge, "at site " + std::to_string(u));
    g.max_degree = std::max(g.max_degree, static_cast<int>(a.size()));
  }
  return g;
}

namespace {

// Strict line scanner: every line must parse completely.
std::vector<long> parse_int_line(const std::string& line, const std::string& where) {
  std::istringstream in(line);
  std::vector<long> vals;
  long v;
  while (in >> v) vals.push_back(v);
  std::string rest;
  if (in.clear(), in >> rest)
    fail(Errc::ParseError, where + ": trailing garbage '" + rest + "'");
  return vals;
}

}  // namespace

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::string line;
  long n = -1, m = -1;
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto vals = parse_int_line(line, path + ":" + std::to_string(lineno));
    if (vals.empty()) continue;
    if (n < 0) {
      if (vals.size() != 2) fail(Errc::ParseError, path + ": header must be 'n m'");
      n = vals[0];
      m = vals[1];
      continue;
    }
    if (vals.size() != 2) fail(Errc::ParseError, path + ":" + std::to_string(lineno) + ": edge must be 'u v'");
    edges.emplace_back(static_cast<int>(vals[0]), static_cast<int>(vals[1]));
  }
  if (n < 0) fail(Errc::ParseError, path + ": missing header");
  if (static_cast<long>(edges.size()) != m)
    fail(Errc::ParseError, path + ": header promises " + std::to_string(m) + " edges, found " +
                               std::to_string(edges.size()));
  return build_graph(static_cast<int>(n), edges);
}

}  // namespace scanmix
