#pragma once

#include <optional>
#include <vector>

#include "scanmix/blocks.hpp"
#include "scanmix/graph.hpp"
#include "scanmix/rational.hpp"

namespace scanmix::tree {

struct RootedTree {
  int root = 0;
  std::vector<int> parent;  // -1 at the root
  std::vector<int> depth;
  std::vector<std::vector<int>> children;  // ascending per site
  int height = 0;
};

// BFS orientation away from `root`. Rejects graphs that are not trees.
RootedTree root_tree(const Graph& g, int root);

// Partition into depth slices of height h: a block groups every site whose
// nearest ancestor at depth 0 mod h is the same. Bottom slices shorter than
// h levels are merged upward so only the root block may be short. Blocks are
// ordered by (depth, id) of their anchor.
std::vector<Block> subtree_blocks(const Graph& g, const RootedTree& t, int h);

// Site weight xi^depth, the geometric profile the bounds are stated for.
std::vector<Rational> level_weights(const RootedTree& t, const Rational& xi);

struct TreeBlockParams {
  int delta;    // degree bound the estimate is evaluated at
  int q;        // number of spins
  int h;        // block height
  Rational xi;  // per-level weight decay, 0 < xi < 1
};

// Weighted influence ceiling for a non-root block whose nearest discrepancy
// sits d levels above the block root; d ranges over 0..h-1.
Rational general_block_bound(const TreeBlockParams& p, int d);

// Same ceiling for the block containing the tree root, with the discrepancy
// d levels below the block's deepest internal branching point.
Rational root_block_bound(const TreeBlockParams& p, int d);

struct BoundEntry {
  bool root_block;
  int d;
  Rational value;
};

struct BoundReport {
  TreeBlockParams params;
  std::vector<BoundEntry> entries;  // 2h rows: general then root, d ascending
  Rational max_bound{0};
  bool satisfied = false;  // every entry strictly below one
};

BoundReport evaluate_bounds(const TreeBlockParams& p);

// Degree rows with a working (h, xi) pair at q = q_formula spins, together
// with the smallest q the single-site estimate certifies (q_naive).
struct TableRow {
  int delta;
  int h;
  Rational xi;
  int q_formula;
  int q_naive;
};

const std::vector<TableRow>& colour_table();
const TableRow& table_row(int delta);  // throws UnknownDelta

// Re-evaluates the stored row's parameters from scratch.
BoundReport verify_table_row(int delta);

struct SearchResult {
  int h;
  Rational xi;
  BoundReport report;
};

// First (h, xi) making every bound feasible, scanning h ascending and xi by
// (denominator, numerator) ascending over coprime fractions below one.
// nullopt means the scan found nothing, not that nothing exists.
std::optional<SearchResult> search_parameters(int delta, int q, int h_max, int den_cap);

}  // namespace scanmix::tree
