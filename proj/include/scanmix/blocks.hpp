#pragma once

#include <string>
#include <vector>

#include "scanmix/graph.hpp"

namespace scanmix {

// One update region. Sites are sorted and distinct; the boundary is the set
// of sites outside the block with a neighbour inside it.
struct Block {
  std::vector<int> sites;
  std::vector<int> boundary;

  bool contains(int j) const;
  int size() const { return static_cast<int>(sites.size()); }
};

std::vector<int> block_boundary(const std::vector<int>& sites, const Graph& g);

// Scan order is the block order given here; one sweep applies every block
// once, first to last.
struct BlockSchedule {
  std::vector<Block> blocks;
  std::vector<std::vector<int>> blocks_containing;  // B(j), ascending block ids

  int size() const { return static_cast<int>(blocks.size()); }
  int cover_count(int j) const { return static_cast<int>(blocks_containing[j].size()); }
};

BlockSchedule make_schedule(const Graph& g, const std::vector<std::vector<int>>& site_lists);

struct CoverReport {
  bool covers = false;
  std::vector<int> covered;
  std::vector<int> uncovered;
  long total_updates = 0;  // sum of block sizes over one sweep
};

CoverReport validate_schedule(const BlockSchedule& s, int n);

// One block per line, sites whitespace separated; line order is scan order.
BlockSchedule read_blocks_file(const std::string& path, const Graph& g);

}  // namespace scanmix
