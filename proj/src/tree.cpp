#include "scanmix/tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "scanmix/errors.hpp"

namespace scanmix::tree {

RootedTree root_tree(const Graph& g, int root) {
  if (g.n == 0) fail(Errc::EmptyTree, "empty graph");
  if (root < 0 || root >= g.n) fail(Errc::IndexOutOfRange, "root " + std::to_string(root));
  long m = 0;
  for (int s = 0; s < g.n; ++s) m += g.degree(s);
  if (m / 2 != g.n - 1) fail(Errc::NotATree, "edge count excludes a tree");

  RootedTree t;
  t.root = root;
  t.parent.assign(g.n, -2);
  t.depth.assign(g.n, 0);
  t.children.assign(g.n, {});
  std::vector<int> order{root};
  t.parent[root] = -1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int s = order[head];
    for (int w : g.adj[s]) {
      if (t.parent[w] != -2) continue;
      t.parent[w] = s;
      t.depth[w] = t.depth[s] + 1;
      t.height = std::max(t.height, t.depth[w]);
      t.children[s].push_back(w);
      order.push_back(w);
    }
  }
  if (static_cast<int>(order.size()) != g.n) fail(Errc::NotATree, "graph is not connected");
  return t;
}

std::vector<Block> subtree_blocks(const Graph& g, const RootedTree& t, int h) {
  if (h < 1) fail(Errc::ParamOutOfRange, "block height must be positive");
  const int n = g.n;
  // Anchor: nearest ancestor at depth 0 mod h. Walking parents is fine at
  // these sizes.
  std::vector<int> anchor(n);
  for (int s = 0; s < n; ++s) {
    int a = s;
    while (t.depth[a] % h != 0) a = t.parent[a];
    anchor[s] = a;
  }
  // Levels actually present under each anchor.
  std::map<int, int> deepest;
  for (int s = 0; s < n; ++s) {
    auto [it, fresh] = deepest.emplace(anchor[s], t.depth[s]);
    if (!fresh) it->second = std::max(it->second, t.depth[s]);
  }
  // A bottom slice with fewer than h levels joins its parent's block. The
  // parent block is always full along that path, so one hop suffices.
  std::map<int, int> target;
  for (const auto& [a, dmax] : deepest) {
    if (a != t.root && dmax - t.depth[a] + 1 < h)
      target[a] = anchor[t.parent[a]];
    else
      target[a] = a;
  }
  std::map<std::pair<int, int>, std::vector<int>> grouped;  // (depth, anchor) -> sites
  for (int s = 0; s < n; ++s) {
    const int a = target.at(anchor[s]);
    grouped[{t.depth[a], a}].push_back(s);
  }
  std::vector<Block> blocks;
  blocks.reserve(grouped.size());
  for (auto& [key, sites] : grouped) {
    std::sort(sites.begin(), sites.end());
    Block b;
    b.sites = std::move(sites);
    b.boundary = block_boundary(b.sites, g);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

std::vector<Rational> level_weights(const RootedTree& t, const Rational& xi) {
  if (sgn(xi) <= 0) fail(Errc::ParamOutOfRange, "weight decay must be positive");
  std::vector<Rational> w(t.parent.size());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = rat_pow(xi, t.depth[s]);
  return w;
}

namespace {

void check_params(const TreeBlockParams& p, int d) {
  if (p.delta < 2) fail(Errc::ParamOutOfRange, "degree bound below two");
  if (p.q <= p.delta) fail(Errc::ParamOutOfRange, "need more spins than the degree bound");
  if (p.h < 1) fail(Errc::ParamOutOfRange, "block height must be positive");
  if (sgn(p.xi) <= 0 || p.xi >= Rational(1)) fail(Errc::ParamOutOfRange, "weight decay must sit in (0,1)");
  if (d < 0 || d >= p.h) fail(Errc::ParamOutOfRange, "level offset must sit in [0,h)");
}

// shared tail: sum_{l=1}^{top} (delta-2)(delta-1)^{h-d+l-1} / (q-delta)^{h-d+2l}
Rational branch_tail(const TreeBlockParams& p, int d, int top) {
  const Rational dm1(p.delta - 1), qd(p.q - p.delta);
  Rational sum(0);
  for (int l = 1; l <= top; ++l)
    sum += Rational(p.delta - 2) * rat_pow(dm1, p.h - d + l - 1) / rat_pow(qd, p.h - d + 2 * l);
  return sum;
}

}  // namespace

Rational general_block_bound(const TreeBlockParams& p, int d) {
  check_params(p, d);
  const Rational dm1(p.delta - 1), qd(p.q - p.delta);
  const Rational through = Rational(1) / (rat_pow(qd, d + 1) * rat_pow(p.xi, d + 1));
  const Rational descend = rat_pow(dm1 * p.xi / qd, p.h - d);
  return through + descend + rat_pow(p.xi, p.h - d) * branch_tail(p, d, d);
}

Rational root_block_bound(const TreeBlockParams& p, int d) {
  check_params(p, d);
  const Rational dm1(p.delta - 1), qd(p.q - p.delta);
  if (d == 0) return Rational(p.delta) * rat_pow(dm1, p.h - 1) * rat_pow(p.xi, p.h) / rat_pow(qd, p.h);
  const Rational descend = rat_pow(dm1 * p.xi / qd, p.h - d);
  const Rational around = rat_pow(dm1, p.h) * rat_pow(p.xi, p.h - d) / rat_pow(qd, p.h + d);
  return descend + around + rat_pow(p.xi, p.h - d) * branch_tail(p, d, d - 1);
}

BoundReport evaluate_bounds(const TreeBlockParams& p) {
  check_params(p, 0);
  BoundReport rep;
  rep.params = p;
  rep.satisfied = true;
  for (int d = 0; d < p.h; ++d) {
    rep.entries.push_back({false, d, general_block_bound(p, d)});
  }
  for (int d = 0; d < p.h; ++d) {
    rep.entries.push_back({true, d, root_block_bound(p, d)});
  }
  for (const BoundEntry& e : rep.entries) {
    rep.max_bound = std::max(rep.max_bound, e.value);
    if (e.value >= Rational(1)) rep.satisfied = false;
  }
  return rep;
}

const std::vector<TableRow>& colour_table() {
  static const std::vector<TableRow> rows = {
      {3, 15, make_ratio(4, 7), 5, 6},    {4, 3, make_ratio(5, 11), 7, 8},
      {5, 12, make_ratio(5, 11), 8, 9},   {6, 3, make_ratio(1, 2), 10, 11},
      {7, 7, make_ratio(10, 23), 11, 12}, {8, 13, make_ratio(1, 3), 12, 14},
      {9, 85, make_ratio(5, 19), 13, 15}, {10, 5, make_ratio(5, 19), 15, 16},
  };
  return rows;
}

const TableRow& table_row(int delta) {
  for (const TableRow& r : colour_table())
    if (r.delta == delta) return r;
  fail(Errc::UnknownDelta, "no tabulated parameters for degree " + std::to_string(delta));
}

BoundReport verify_table_row(int delta) {
  const TableRow& r = table_row(delta);
  return evaluate_bounds({r.delta, r.q_formula, r.h, r.xi});
}

std::optional<SearchResult> search_parameters(int delta, int q, int h_max, int den_cap) {
  if (h_max < 1 || den_cap < 2) fail(Errc::ParamOutOfRange, "empty search grid");
  if (delta < 2 || q <= delta) fail(Errc::ParamOutOfRange, "degenerate degree or spin count");
  for (int h = 1; h <= h_max; ++h) {
    for (int den = 2; den <= den_cap; ++den) {
      for (int num = 1; num < den; ++num) {
        if (std::gcd(num, den) != 1) continue;
        const TreeBlockParams p{delta, q, h, make_ratio(num, den)};
        bool ok = true;
        for (int d = 0; d < h && ok; ++d)
          ok = general_block_bound(p, d) < Rational(1) && root_block_bound(p, d) < Rational(1);
        if (ok) return SearchResult{h, p.xi, evaluate_bounds(p)};
      }
    }
  }
  return std::nullopt;
}

}  // namespace scanmix::tree
