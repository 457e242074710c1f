#include "scanmix/blocks.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "scanmix/errors.hpp"

namespace scanmix {

bool Block::contains(int j) const {
  return std::binary_search(sites.begin(), sites.end(), j);
}

std::vector<int> block_boundary(const std::vector<int>& sites, const Graph& g) {
  std::vector<char> in_block(g.n, 0), out(g.n, 0);
  for (int j : sites) in_block[j] = 1;
  for (int j : sites)
    for (int w : g.adj[j])
      if (!in_block[w]) out[w] = 1;
  std::vector<int> boundary;
  for (int v = 0; v < g.n; ++v)
    if (out[v]) boundary.push_back(v);
  return boundary;
}

BlockSchedule make_schedule(const Graph& g, const std::vector<std::vector<int>>& site_lists) {
  BlockSchedule s;
  s.blocks_containing.assign(g.n, {});
  for (size_t k = 0; k < site_lists.size(); ++k) {
    Block b;
    b.sites = site_lists[k];
    if (b.sites.empty()) fail(Errc::EmptyBlock, "block " + std::to_string(k));
    std::sort(b.sites.begin(), b.sites.end());
    if (std::adjacent_find(b.sites.begin(), b.sites.end()) != b.sites.end())
      fail(Errc::DuplicateSite, "block " + std::to_string(k));
    for (int j : b.sites) {
      if (j < 0 || j >= g.n)
        fail(Errc::IndexOutOfRange, "block " + std::to_string(k) + " site " + std::to_string(j));
      s.blocks_containing[j].push_back(static_cast<int>(k));
    }
    b.boundary = block_boundary(b.sites, g);
    s.blocks.push_back(std::move(b));
  }
  return s;
}

CoverReport validate_schedule(const BlockSchedule& s, int n) {
  CoverReport r;
  std::vector<char> hit(n, 0);
  for (const Block& b : s.blocks) {
    r.total_updates += b.size();
    for (int j : b.sites) hit[j] = 1;
  }
  for (int j = 0; j < n; ++j) (hit[j] ? r.covered : r.uncovered).push_back(j);
  r.covers = r.uncovered.empty();
  return r;
}

BlockSchedule read_blocks_file(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::vector<std::vector<int>> lists;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<int> sites;
    long v;
    while (ls >> v) sites.push_back(static_cast<int>(v));
    std::string rest;
    if (ls.clear(), ls >> rest)
      fail(Errc::ParseError, path + ":" + std::to_string(lineno) + ": trailing garbage '" + rest + "'");
    if (!sites.empty()) lists.push_back(std::move(sites));
  }
  if (lists.empty()) fail(Errc::ParseError, path + ": no blocks");
  return make_schedule(g, lists);
}

}  // namespace scanmix
