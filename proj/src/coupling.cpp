#include "scanmix/coupling.hpp"

#include <algorithm>
#include <limits>

#include "scanmix/errors.hpp"

namespace scanmix::coupling {

namespace {

constexpr Errc kLemma = Errc::Infeasible;  // structural facts the cases rely on

Rational uniform_mass(std::size_t d) { return Rational(1) / static_cast<unsigned long>(d); }

}  // namespace

SupportDist uniform_support(const UpdateSupport& us) {
  SupportDist d;
  d.support = us.outcomes;
  d.mass.assign(us.size(), uniform_mass(us.size()));
  return d;
}

Rational Coupling::disagreement_at(int site) const {
  Rational p(0);
  for (const Entry& e : entries)
    if (a.support[e.ia].spins[site] != b.support[e.ib].spins[site]) p += e.mass;
  return p;
}

void Coupling::check_marginals() const {
  std::vector<Rational> row(a.size(), Rational(0)), colsum(b.size(), Rational(0));
  Rational total(0);
  for (const Entry& e : entries) {
    if (sgn(e.mass) <= 0) fail(Errc::MarginalMismatch, "non-positive coupling mass");
    row[e.ia] += e.mass;
    colsum[e.ib] += e.mass;
    total += e.mass;
  }
  for (std::size_t t = 0; t < a.size(); ++t)
    if (row[t] != a.mass[t]) fail(Errc::MarginalMismatch, "first marginal off at index " + std::to_string(t));
  for (std::size_t t = 0; t < b.size(); ++t)
    if (colsum[t] != b.mass[t]) fail(Errc::MarginalMismatch, "second marginal off at index " + std::to_string(t));
  if (total != Rational(1)) fail(Errc::MarginalMismatch, "total mass is not one");
}

namespace {

// Accumulates joint mass cell-wise, then emits entries in (ia, ib) order.
struct JointBuilder {
  std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> cells;

  void add(std::uint32_t ia, std::uint32_t ib, const Rational& m) {
    if (sgn(m) == 0) return;
    cells[{ia, ib}] += m;
  }

  Coupling finish(SupportDist a, SupportDist b) const {
    Coupling c;
    c.a = std::move(a);
    c.b = std::move(b);
    c.entries.reserve(cells.size());
    for (const auto& [key, m] : cells) c.entries.push_back({key.first, key.second, m});
    c.check_marginals();
    return c;
  }
};

// Law over colours at one site. Dense over 0..q-1.
using ColourLaw = std::vector<Rational>;

struct ColourPairMass {
  int c1, c2;
  Rational mass;
};

// Diagonal mass min(p, p'), residuals paired in ascending colour order.
std::vector<ColourPairMass> maximal_colour_coupling(const ColourLaw& m1, const ColourLaw& m2) {
  const int q = static_cast<int>(m1.size());
  std::vector<ColourPairMass> out;
  ColourLaw r1 = m1, r2 = m2;
  for (int c = 0; c < q; ++c) {
    const Rational d = std::min(m1[c], m2[c]);
    if (sgn(d) > 0) {
      out.push_back({c, c, d});
      r1[c] -= d;
      r2[c] -= d;
    }
  }
  int c1 = 0, c2 = 0;
  for (;;) {
    while (c1 < q && sgn(r1[c1]) == 0) ++c1;
    while (c2 < q && sgn(r2[c2]) == 0) ++c2;
    if (c1 >= q || c2 >= q) break;
    const Rational t = std::min(r1[c1], r2[c2]);
    out.push_back({c1, c2, t});
    r1[c1] -= t;
    r2[c2] -= t;
  }
  return out;
}

ColourLaw site_law(const SupportDist& d, int site, int q) {
  ColourLaw law(q, Rational(0));
  for (std::size_t t = 0; t < d.size(); ++t) law[d.support[t].spins[site]] += d.mass[t];
  return law;
}

}  // namespace

Coupling maximal_site_coupling(const SupportDist& d1, const SupportDist& d2, int site) {
  if (d1.size() == 0 || d2.size() == 0) fail(Errc::EmptySupport, "empty update law");
  const int n = d1.support[0].size();
  if (site < 0 || site >= n) fail(Errc::IndexOutOfRange, "site " + std::to_string(site));
  // Each law must be indexable by the spin at `site` alone.
  auto colour_index = [site](const SupportDist& d) {
    std::map<int, std::uint32_t> idx;
    for (std::size_t t = 0; t < d.size(); ++t) {
      const int c = d.support[t].spins[site];
      if (!idx.emplace(c, static_cast<std::uint32_t>(t)).second)
        fail(Errc::StrategyShapeMismatch, "law is not determined by the spin at the coupled site");
    }
    return idx;
  };
  auto idx1 = colour_index(d1), idx2 = colour_index(d2);
  int q = 0;
  for (const auto& [c, t] : idx1) q = std::max(q, c + 1);
  for (const auto& [c, t] : idx2) q = std::max(q, c + 1);

  JointBuilder jb;
  for (const auto& pm : maximal_colour_coupling(site_law(d1, site, q), site_law(d2, site, q)))
    jb.add(idx1.at(pm.c1), idx2.at(pm.c2), pm.mass);
  return jb.finish(d1, d2);
}

Coupling identity_coupling(const SupportDist& d1, const SupportDist& d2) {
  if (d1.size() != d2.size())
    fail(Errc::StrategyShapeMismatch, "identity pairing needs equal support sizes (" +
                                          std::to_string(d1.size()) + " vs " + std::to_string(d2.size()) + ")");
  for (std::size_t t = 0; t < d1.size(); ++t)
    if (d1.mass[t] != d2.mass[t])
      fail(Errc::StrategyShapeMismatch, "identity pairing needs matching masses");
  JointBuilder jb;
  for (std::size_t t = 0; t < d1.size(); ++t)
    jb.add(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t), d1.mass[t]);
  return jb.finish(d1, d2);
}

// ---------------------------------------------------------------------------
// Minimum expected Hamming transport, successive shortest augmenting paths.
// Costs are integers, masses exact rationals; Bellman-Ford relaxation in a
// fixed order keeps the pivot sequence deterministic.

Coupling min_hamming_coupling(const SupportDist& d1, const SupportDist& d2, const std::vector<int>& sites) {
  const int n1 = static_cast<int>(d1.size()), n2 = static_cast<int>(d2.size());
  if (n1 == 0 || n2 == 0) fail(Errc::EmptySupport, "empty update law");

  std::vector<std::vector<int>> cost(n1, std::vector<int>(n2, 0));
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) {
      int h = 0;
      for (int s : sites)
        if (d1.support[a].spins[s] != d2.support[b].spins[s]) ++h;
      cost[a][b] = h;
    }

  std::vector<Rational> supply = d1.mass, demand = d2.mass;
  std::map<std::pair<int, int>, Rational> flow;
  Rational remaining(1);

  const long INF = std::numeric_limits<long>::max() / 4;
  while (sgn(remaining) > 0) {
    // Nodes: 0..n1-1 rows, n1..n1+n2-1 columns.
    std::vector<long> dist(n1 + n2, INF);
    std::vector<int> parent(n1 + n2, -1);
    for (int a = 0; a < n1; ++a)
      if (sgn(supply[a]) > 0) dist[a] = 0;
    for (int round = 0; round < n1 + n2; ++round) {
      bool changed = false;
      for (int a = 0; a < n1; ++a) {
        if (dist[a] >= INF) continue;
        for (int b = 0; b < n2; ++b)
          if (dist[a] + cost[a][b] < dist[n1 + b]) {
            dist[n1 + b] = dist[a] + cost[a][b];
            parent[n1 + b] = a;
            changed = true;
          }
      }
      for (int b = 0; b < n2; ++b) {
        if (dist[n1 + b] >= INF) continue;
        for (int a = 0; a < n1; ++a) {
          auto it = flow.find({a, b});
          if (it == flow.end() || sgn(it->second) == 0) continue;
          if (dist[n1 + b] - cost[a][b] < dist[a]) {
            dist[a] = dist[n1 + b] - cost[a][b];
            parent[a] = n1 + b;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    int best = -1;
    for (int b = 0; b < n2; ++b)
      if (sgn(demand[b]) > 0 && dist[n1 + b] < INF && (best < 0 || dist[n1 + b] < dist[n1 + best])) best = b;
    if (best < 0) fail(Errc::Infeasible, "transport ran out of augmenting paths");

    // Trace back to a supply row, collecting the bottleneck.
    std::vector<int> path;  // node ids, column-first
    int node = n1 + best;
    Rational eps = demand[best];
    while (parent[node] != -1) {
      path.push_back(node);
      const int prev = parent[node];
      if (node >= n1) {
        // forward arc prev -> node, uncapacitated
      } else {
        eps = std::min(eps, flow.at({node, prev - n1}));
      }
      node = prev;
    }
    path.push_back(node);
    eps = std::min(eps, supply[node]);
    if (sgn(eps) <= 0) fail(Errc::Infeasible, "degenerate augmentation");

    // Apply along the path (stored column-first, source row last).
    for (std::size_t t = path.size(); t-- > 1;) {
      const int from = path[t], to = path[t - 1];
      if (from < n1)
        flow[{from, to - n1}] += eps;  // forward arc row->col
      else
        flow[{to, from - n1}] -= eps;  // backward arc col->row
    }
    supply[node] -= eps;
    demand[best] -= eps;
    remaining -= eps;
  }

  JointBuilder jb;
  for (const auto& [cell, m] : flow)
    if (sgn(m) > 0) jb.add(cell.first, cell.second, m);
  return jb.finish(d1, d2);
}

// ---------------------------------------------------------------------------
// Edge-block case analysis.

const char* edge_case_name(EdgeCase c) {
  switch (c) {
    case EdgeCase::OffBoundary: return "off-boundary";
    case EdgeCase::OneEndpoint: return "one-endpoint";
    case EdgeCase::TriangleClean: return "triangle-clean";
    case EdgeCase::TriangleOneSided: return "triangle-one-sided";
    case EdgeCase::TriangleOpposed: return "triangle-opposed";
    case EdgeCase::TriangleBothDirty: return "triangle-both-dirty";
  }
  return "?";
}

namespace {

// Work representation: outcomes of an edge-block update as colour pairs
// (spin at u, spin at v), ascending, mirroring packed support order.
struct PairLaw {
  std::vector<std::pair<int, int>> vals;
  std::map<std::pair<int, int>, std::uint32_t> index;

  std::size_t size() const { return vals.size(); }
  std::uint32_t at(std::pair<int, int> p, const char* who) const {
    auto it = index.find(p);
    if (it == index.end())
      fail(kLemma, std::string(who) + ": expected outcome (" + std::to_string(p.first + 1) + "," +
                       std::to_string(p.second + 1) + ") is not a valid completion");
    return it->second;
  }
};

PairLaw pair_law(const UpdateSupport& us, int u, int v) {
  PairLaw pl;
  pl.vals.reserve(us.size());
  for (std::size_t t = 0; t < us.size(); ++t) {
    std::pair<int, int> p{us.outcomes[t].spins[u], us.outcomes[t].spins[v]};
    pl.vals.push_back(p);
    pl.index.emplace(p, static_cast<std::uint32_t>(t));
  }
  return pl;
}

ColourLaw pair_marginal(const PairLaw& pl, bool first, int q) {
  ColourLaw law(q, Rational(0));
  const Rational w = uniform_mass(pl.size());
  for (const auto& p : pl.vals) law[first ? p.first : p.second] += w;
  return law;
}

// Couple the `first_u` coordinate greedily, then the conditionals of the
// other coordinate, again greedily. Both steps are maximal couplings.
void two_step(JointBuilder& jb, const PairLaw& v1, const PairLaw& v2, bool first_u, int q) {
  ColourLaw m1 = pair_marginal(v1, first_u, q), m2 = pair_marginal(v2, first_u, q);
  auto outer = maximal_colour_coupling(m1, m2);
  auto conditional = [&](const PairLaw& pl, int c) {
    ColourLaw law(q, Rational(0));
    long cnt = 0;
    for (const auto& p : pl.vals)
      if ((first_u ? p.first : p.second) == c) ++cnt;
    const Rational w = uniform_mass(cnt);
    for (const auto& p : pl.vals)
      if ((first_u ? p.first : p.second) == c) law[first_u ? p.second : p.first] += w;
    return law;
  };
  for (const auto& om : outer) {
    auto inner = maximal_colour_coupling(conditional(v1, om.c1), conditional(v2, om.c2));
    for (const auto& im : inner) {
      const std::pair<int, int> p1 = first_u ? std::pair{om.c1, im.c1} : std::pair{im.c1, om.c1};
      const std::pair<int, int> p2 = first_u ? std::pair{om.c2, im.c2} : std::pair{im.c2, om.c2};
      jb.add(v1.at(p1, "two-step"), v2.at(p2, "two-step"), om.mass * im.mass);
    }
  }
}

// No boundary site besides i carries either discrepancy spin: the supports
// have equal size and a colour-relabelling bijection couples them exactly.
void triangle_clean(JointBuilder& jb, const PairLaw& v1, const PairLaw& v2, int colour1, int colour2) {
  if (v1.size() != v2.size()) fail(kLemma, "clean triangle: support sizes differ");
  const Rational w = uniform_mass(v1.size());
  std::vector<char> hit(v2.size(), 0);
  for (std::size_t t = 0; t < v1.size(); ++t) {
    auto [cu, cv] = v1.vals[t];
    std::pair<int, int> target{cu, cv};
    if (cu == colour2)
      target.first = colour1;
    else if (cv == colour2)
      target.second = colour1;
    const std::uint32_t ib = v2.at(target, "clean triangle");
    if (hit[ib]) fail(kLemma, "clean triangle: relabelling is not a bijection");
    hit[ib] = 1;
    jb.add(static_cast<std::uint32_t>(t), ib, w);
  }
}

// Discrepancy spins sit on opposite endpoints: pair the leftover rows by
// rank, spread any excess uniformly.
void triangle_opposed(JointBuilder& jb, const PairLaw& v1, const PairLaw& v2, bool jp_is_u, int colour1,
                      int colour2) {
  const std::size_t d1 = v1.size(), d2 = v2.size();
  if (d1 < d2) {
    // Build from the other side and transpose; swapping the laws swaps the
    // colour roles and the endpoint labels.
    JointBuilder tr;
    triangle_opposed(tr, v2, v1, !jp_is_u, colour2, colour1);
    for (const auto& [cell, m] : tr.cells) jb.add(cell.second, cell.first, m);
    return;
  }
  auto jp_of = [&](std::pair<int, int> p) { return jp_is_u ? p.first : p.second; };
  auto j_of = [&](std::pair<int, int> p) { return jp_is_u ? p.second : p.first; };

  const Rational w1 = uniform_mass(d1);
  std::vector<std::uint32_t> z1, z2;
  for (std::size_t t = 0; t < d1; ++t) {
    if (jp_of(v1.vals[t]) == colour2)
      z1.push_back(static_cast<std::uint32_t>(t));
    else
      jb.add(static_cast<std::uint32_t>(t), v2.at(v1.vals[t], "opposed triangle"), w1);
  }
  for (std::size_t t = 0; t < d2; ++t)
    if (j_of(v2.vals[t]) == colour1) z2.push_back(static_cast<std::uint32_t>(t));
  if (z1.size() < z2.size() || z1.size() - z2.size() != d1 - d2)
    fail(kLemma, "opposed triangle: remainder sizes do not balance");
  for (std::size_t t = 0; t < z2.size(); ++t) jb.add(z1[t], z2[t], w1);
  const Rational spread = uniform_mass(d1) / static_cast<unsigned long>(d2);
  for (std::size_t t = z2.size(); t < z1.size(); ++t)
    for (std::size_t g = 0; g < d2; ++g) jb.add(z1[t], static_cast<std::uint32_t>(g), spread);
}

// Both endpoints see the old discrepancy spin elsewhere: every second-law
// outcome is also valid for the first law; remainder rows are routed under
// per-column quotas, preferring the column that matches their clean spin.
void triangle_both_dirty(JointBuilder& jb, const PairLaw& v1, const PairLaw& v2, int colour2) {
  const std::size_t d1 = v1.size(), d2 = v2.size();
  const Rational w1 = uniform_mass(d1);
  std::vector<std::uint32_t> zu, zv;
  for (std::size_t t = 0; t < d1; ++t) {
    auto [cu, cv] = v1.vals[t];
    if (cu == colour2)
      zu.push_back(static_cast<std::uint32_t>(t));
    else if (cv == colour2)
      zv.push_back(static_cast<std::uint32_t>(t));
    else
      jb.add(static_cast<std::uint32_t>(t), v2.at(v1.vals[t], "dirty triangle"), w1);
  }
  if (d1 != d2 + zu.size() + zv.size()) fail(kLemma, "dirty triangle: support sizes do not decompose");

  auto route = [&](const std::vector<std::uint32_t>& rows, bool two_at_u) {
    if (rows.empty()) return;
    const Rational quota0 =
        uniform_mass(d1) * static_cast<unsigned long>(rows.size()) / static_cast<unsigned long>(d2);
    std::vector<Rational> quota(d2, quota0), leftover(rows.size(), w1);
    // Preferred pass: match the unconstrained coordinate.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int keep = two_at_u ? v1.vals[rows[r]].second : v1.vals[rows[r]].first;
      for (std::size_t g = 0; g < d2 && sgn(leftover[r]) > 0; ++g) {
        const int gk = two_at_u ? v2.vals[g].second : v2.vals[g].first;
        if (gk != keep || sgn(quota[g]) == 0) continue;
        const Rational take = std::min(leftover[r], quota[g]);
        jb.add(rows[r], static_cast<std::uint32_t>(g), take);
        leftover[r] -= take;
        quota[g] -= take;
      }
    }
    // Spill pass: whatever quota is left, ascending.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t g = 0; g < d2 && sgn(leftover[r]) > 0; ++g) {
        if (sgn(quota[g]) == 0) continue;
        const Rational take = std::min(leftover[r], quota[g]);
        jb.add(rows[r], static_cast<std::uint32_t>(g), take);
        leftover[r] -= take;
        quota[g] -= take;
      }
      if (sgn(leftover[r]) != 0) fail(kLemma, "dirty triangle: row mass left unrouted");
    }
    for (std::size_t g = 0; g < d2; ++g)
      if (sgn(quota[g]) != 0) fail(kLemma, "dirty triangle: column quota left unfilled");
  };
  route(zu, /*two_at_u=*/true);
  route(zv, /*two_at_u=*/false);
}

struct EdgeDispatch {
  EdgeCase fired;
  bool swapped;
};

EdgeCoupling edge_case_core(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i,
                            const Block& b, bool allow_swap);

EdgeCoupling transpose_edge(const EdgeCoupling& ec) {
  EdgeCoupling out;
  out.fired = ec.fired;
  out.swapped = true;
  out.case_bound = ec.case_bound;
  out.blanket_bound = ec.blanket_bound;
  out.joint.a = ec.joint.b;
  out.joint.b = ec.joint.a;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> cells;
  for (const auto& e : ec.joint.entries) cells[{e.ib, e.ia}] += e.mass;
  for (const auto& [cell, m] : cells) out.joint.entries.push_back({cell.first, cell.second, m});
  out.joint.check_marginals();
  return out;
}

EdgeCoupling edge_case_core(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i,
                            const Block& b, bool allow_swap) {
  const Graph& g = sys.graph;
  const int q = sys.q;
  const int delta = g.max_degree;
  const int u = b.sites[0], v = b.sites[1];

  HeatBathKernel hb;
  SupportDist da = uniform_support(hb.support(sys, x, b));
  SupportDist db = uniform_support(hb.support(sys, y, b));
  PairLaw v1 = pair_law(UpdateSupport{da.support}, u, v);
  PairLaw v2 = pair_law(UpdateSupport{db.support}, u, v);

  EdgeCoupling ec;
  const Rational inv_qd = make_ratio(1, q - delta);
  const Rational inv_qd1 = make_ratio(1, q - delta + 1);
  ec.blanket_bound = inv_qd + inv_qd * inv_qd;

  const bool au = g.has_edge(i, u), av = g.has_edge(i, v);
  if (!au && !av) {
    if (v1.vals != v2.vals) fail(kLemma, "identical update laws expected off the boundary");
    JointBuilder jb;
    const Rational w = uniform_mass(v1.size());
    for (std::size_t t = 0; t < v1.size(); ++t)
      jb.add(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t), w);
    ec.joint = jb.finish(da, db);
    ec.fired = EdgeCase::OffBoundary;
    ec.case_bound[u] = Rational(0);
    ec.case_bound[v] = Rational(0);
    return ec;
  }

  const int colour1 = x.spins[i], colour2 = y.spins[i];
  JointBuilder jb;

  if (au != av) {
    const int j = au ? u : v, jp = au ? v : u;
    two_step(jb, v1, v2, /*first_u=*/au, q);
    ec.joint = jb.finish(da, db);
    ec.fired = EdgeCase::OneEndpoint;
    ec.case_bound[j] = inv_qd;
    ec.case_bound[jp] = inv_qd * inv_qd;
    return ec;
  }

  // Both endpoints adjacent: read the marks left by other boundary sites.
  auto marked = [&](int s, int colour) {
    for (int w : g.adj[s]) {
      if (w == i || w == u || w == v) continue;
      if (x.spins[w] == colour) return true;
    }
    return false;
  };
  const bool u1 = marked(u, colour1), u2 = marked(u, colour2);
  const bool vm1 = marked(v, colour1), vm2 = marked(v, colour2);

  if (!u1 && !u2 && !vm1 && !vm2) {
    triangle_clean(jb, v1, v2, colour1, colour2);
    ec.joint = jb.finish(da, db);
    ec.fired = EdgeCase::TriangleClean;
    ec.case_bound[u] = inv_qd1;
    ec.case_bound[v] = inv_qd;
    return ec;
  }
  for (const auto& [jp, j] : {std::pair{u, v}, std::pair{v, u}}) {
    const bool jp1 = (jp == u) ? u1 : vm1;
    const bool j1 = (j == u) ? u1 : vm1;
    const bool j2 = (j == u) ? u2 : vm2;
    if (jp1 && !j1 && !j2) {
      two_step(jb, v1, v2, /*first_u=*/jp == u, q);
      ec.joint = jb.finish(da, db);
      ec.fired = EdgeCase::TriangleOneSided;
      ec.case_bound[jp] = inv_qd1;
      ec.case_bound[j] = inv_qd;
      return ec;
    }
  }
  for (const auto& [jp, j] : {std::pair{u, v}, std::pair{v, u}}) {
    const bool jp1 = (jp == u) ? u1 : vm1;
    const bool jp2 = (jp == u) ? u2 : vm2;
    const bool j1 = (j == u) ? u1 : vm1;
    const bool j2 = (j == u) ? u2 : vm2;
    if (jp1 && !jp2 && j2 && !j1) {
      triangle_opposed(jb, v1, v2, /*jp_is_u=*/jp == u, colour1, colour2);
      ec.joint = jb.finish(da, db);
      ec.fired = EdgeCase::TriangleOpposed;
      ec.case_bound[jp] = inv_qd;
      ec.case_bound[j] = inv_qd;
      return ec;
    }
  }
  if (u1 && vm1) {
    triangle_both_dirty(jb, v1, v2, colour2);
    ec.joint = jb.finish(da, db);
    ec.fired = EdgeCase::TriangleBothDirty;
    const Rational bd = inv_qd1 + inv_qd1 * inv_qd1;
    ec.case_bound[u] = bd;
    ec.case_bound[v] = bd;
    return ec;
  }
  if (!allow_swap) fail(kLemma, "no edge case matched in either orientation");
  return transpose_edge(edge_case_core(sys, y, x, i, b, /*allow_swap=*/false));
}

}  // namespace

EdgeCoupling edge_case_coupling(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i,
                                const Block& b) {
  if (b.size() != 2 || !sys.graph.has_edge(b.sites[0], b.sites[1]))
    fail(Errc::NotAnEdgeBlock, "edge case analysis needs a two-site block along an edge");
  if (i < 0 || i >= sys.n()) fail(Errc::IndexOutOfRange, "site " + std::to_string(i));
  for (int j = 0; j < sys.n(); ++j) {
    const bool differ = x.spins[j] != y.spins[j];
    if (differ != (j == i))
      fail(Errc::NotInDiscrepancyClass, "configurations must differ exactly at site " + std::to_string(i));
  }
  return edge_case_core(sys, x, y, i, b, /*allow_swap=*/true);
}

// ---------------------------------------------------------------------------
// Subtree recursion.

namespace {

// Proper colourings of `sites` given the spins of `base` outside, ascending.
void completions_rec(const SpinSystem& sys, const std::vector<int>& sites, std::size_t t, Configuration& work,
                     std::vector<Configuration>& out) {
  if (t == sites.size()) {
    out.push_back(work);
    return;
  }
  const int j = sites[t];
  for (int s = 0; s < sys.q; ++s) {
    bool ok = true;
    for (int w : sys.graph.adj[j])
      if (work.spins[w] == s) {
        // Sites later in the list have stale spins; only reject conflicts
        // with fixed outside spins or already-assigned block sites.
        bool later = false;
        for (std::size_t r = t + 1; r < sites.size(); ++r)
          if (sites[r] == w) {
            later = true;
            break;
          }
        if (!later) {
          ok = false;
          break;
        }
      }
    if (ok) {
      work.spins[j] = static_cast<std::uint8_t>(s);
      completions_rec(sys, sites, t + 1, work, out);
    }
  }
}

std::vector<Configuration> completions(const SpinSystem& sys, const std::vector<int>& sites,
                                       const Configuration& base) {
  std::vector<Configuration> out;
  Configuration work = base;
  completions_rec(sys, sites, 0, work, out);
  if (out.empty()) fail(Errc::EmptySupport, "no completion of the region");
  return out;
}

ColourLaw region_marginal(const std::vector<Configuration>& comp, int site, int q) {
  ColourLaw law(q, Rational(0));
  const Rational w = uniform_mass(comp.size());
  for (const Configuration& c : comp) law[c.spins[site]] += w;
  return law;
}

// The unique differing site adjacent to the region, or -1 when the two
// boundary configurations agree around it.
int region_discrepancy(const SpinSystem& sys, const std::vector<int>& region, const Configuration& x,
                       const Configuration& y) {
  std::vector<char> inside(sys.n(), 0);
  for (int s : region) inside[s] = 1;
  int found = -1;
  for (int s : region)
    for (int w : sys.graph.adj[s]) {
      if (inside[w] || x.spins[w] == y.spins[w]) continue;
      if (found >= 0 && found != w) fail(Errc::NotATreeBlock, "two discrepant sites touch the region");
      found = w;
    }
  return found;
}

// Root of the region as seen from the discrepancy, plus the child subtrees
// hanging below it.
struct RegionSplit {
  int root;
  std::vector<std::vector<int>> children;
};

RegionSplit split_region(const SpinSystem& sys, const std::vector<int>& region, int outside) {
  std::vector<char> inside(sys.n(), 0);
  for (int s : region) inside[s] = 1;
  int root = -1;
  for (int w : sys.graph.adj[outside])
    if (inside[w]) {
      if (root >= 0) fail(Errc::NotATreeBlock, "discrepancy touches the region at two sites");
      root = w;
    }
  if (root < 0) fail(Errc::NotATreeBlock, "discrepancy does not touch the region");

  RegionSplit rs;
  rs.root = root;
  std::vector<char> seen(sys.n(), 0);
  seen[root] = 1;
  for (int s : region) {
    if (s == root || seen[s]) continue;
    // Flood the component of region minus root containing s.
    std::vector<int> comp{s};
    seen[s] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (int w : sys.graph.adj[comp[head]])
        if (inside[w] && w != root && !seen[w]) {
          seen[w] = 1;
          comp.push_back(w);
        }
    std::sort(comp.begin(), comp.end());
    rs.children.push_back(std::move(comp));
  }
  std::sort(rs.children.begin(), rs.children.end());
  return rs;
}

std::map<int, Rational> tree_disagree_rec(const SpinSystem& sys, const std::vector<int>& region,
                                          const Configuration& x, const Configuration& y) {
  std::map<int, Rational> out;
  for (int s : region) out[s] = Rational(0);
  const int disc = region_discrepancy(sys, region, x, y);
  if (disc < 0) return out;

  RegionSplit rs = split_region(sys, region, disc);
  auto comp1 = completions(sys, region, x);
  auto comp2 = completions(sys, region, y);
  auto psi = maximal_colour_coupling(region_marginal(comp1, rs.root, sys.q),
                                     region_marginal(comp2, rs.root, sys.q));
  Configuration bx = x, by = y;
  for (const auto& pm : psi) {
    if (pm.c1 == pm.c2) continue;  // identical boundary below, no disagreement
    out[rs.root] += pm.mass;
    bx.spins[rs.root] = static_cast<std::uint8_t>(pm.c1);
    by.spins[rs.root] = static_cast<std::uint8_t>(pm.c2);
    for (const auto& child : rs.children) {
      auto sub = tree_disagree_rec(sys, child, bx, by);
      for (const auto& [site, p] : sub) out[site] += pm.mass * p;
    }
  }
  return out;
}

using JointList = std::vector<std::tuple<Configuration, Configuration, Rational>>;

JointList tree_joint_rec(const SpinSystem& sys, const std::vector<int>& region, const Configuration& x,
                         const Configuration& y) {
  const int disc = region_discrepancy(sys, region, x, y);
  JointList out;
  if (disc < 0) {
    auto comp = completions(sys, region, x);
    const Rational w = uniform_mass(comp.size());
    for (const Configuration& z : comp) {
      Configuration zy = y;
      for (int s : region) zy.spins[s] = z.spins[s];
      out.emplace_back(z, zy, w);
    }
    return out;
  }
  RegionSplit rs = split_region(sys, region, disc);
  auto comp1 = completions(sys, region, x);
  auto comp2 = completions(sys, region, y);
  auto psi = maximal_colour_coupling(region_marginal(comp1, rs.root, sys.q),
                                     region_marginal(comp2, rs.root, sys.q));
  for (const auto& pm : psi) {
    Configuration bx = x, by = y;
    bx.spins[rs.root] = static_cast<std::uint8_t>(pm.c1);
    by.spins[rs.root] = static_cast<std::uint8_t>(pm.c2);
    JointList acc{{bx, by, pm.mass}};
    for (const auto& child : rs.children) {
      // Children are conditionally independent given the root draw.
      JointList next;
      for (auto& [cx, cy, m] : acc) {
        JointList sub = tree_joint_rec(sys, child, cx, cy);
        for (auto& [zx, zy, zm] : sub) {
          Configuration nx = cx, ny = cy;
          for (int s : child) {
            nx.spins[s] = zx.spins[s];
            ny.spins[s] = zy.spins[s];
          }
          next.emplace_back(std::move(nx), std::move(ny), m * zm);
        }
      }
      acc = std::move(next);
    }
    for (auto& e : acc) out.push_back(std::move(e));
  }
  return out;
}

void validate_tree_block(const SpinSystem& sys, int i, const Block& b) {
  // Induced subgraph must be a tree and i must touch it exactly once.
  long internal_edges = 0;
  for (int s : b.sites)
    for (int w : sys.graph.adj[s])
      if (w > s && b.contains(w)) ++internal_edges;
  if (internal_edges != b.size() - 1)
    fail(Errc::NotATreeBlock, "block does not induce a tree");
  std::vector<char> seen(sys.n(), 0);
  std::vector<int> stack{b.sites[0]};
  seen[b.sites[0]] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int w : sys.graph.adj[s])
      if (b.contains(w) && !seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  if (count != b.size()) fail(Errc::NotATreeBlock, "block does not induce a connected tree");
  int touches = 0;
  for (int w : sys.graph.adj[i])
    if (b.contains(w)) ++touches;
  if (touches != 1)
    fail(Errc::NotATreeBlock, "discrepancy site must neighbour exactly one block site");
}

void validate_pair(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i) {
  if (i < 0 || i >= sys.n()) fail(Errc::IndexOutOfRange, "site " + std::to_string(i));
  for (int j = 0; j < sys.n(); ++j) {
    const bool differ = x.spins[j] != y.spins[j];
    if (differ != (j == i))
      fail(Errc::NotInDiscrepancyClass, "configurations must differ exactly at site " + std::to_string(i));
  }
}

}  // namespace

std::map<int, Rational> recursive_tree_disagreement(const SpinSystem& sys, const Configuration& x,
                                                    const Configuration& y, int i, const Block& b) {
  validate_pair(sys, x, y, i);
  validate_tree_block(sys, i, b);
  return tree_disagree_rec(sys, b.sites, x, y);
}

Coupling recursive_tree_coupling(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i,
                                 const Block& b) {
  validate_pair(sys, x, y, i);
  validate_tree_block(sys, i, b);
  HeatBathKernel hb;
  SupportDist da = uniform_support(hb.support(sys, x, b));
  SupportDist db = uniform_support(hb.support(sys, y, b));
  std::map<std::uint64_t, std::uint32_t> ia, ib;
  for (std::size_t t = 0; t < da.size(); ++t) ia[pack_index(da.support[t], sys.q)] = t;
  for (std::size_t t = 0; t < db.size(); ++t) ib[pack_index(db.support[t], sys.q)] = t;
  JointBuilder jb;
  for (const auto& [zx, zy, m] : tree_joint_rec(sys, b.sites, x, y))
    jb.add(ia.at(pack_index(zx, sys.q)), ib.at(pack_index(zy, sys.q)), m);
  return jb.finish(da, db);
}

std::pair<Configuration, Configuration> sample_tree_coupling(const SpinSystem& sys, const Configuration& x,
                                                             const Configuration& y, int i, const Block& b,
                                                             CounterRng& rng) {
  validate_pair(sys, x, y, i);
  validate_tree_block(sys, i, b);

  // Walk the recursion, drawing each level from its exact colour coupling.
  std::vector<std::pair<std::vector<int>, std::pair<Configuration, Configuration>>> work;
  Configuration outx = x, outy = y;
  work.push_back({b.sites, {x, y}});
  while (!work.empty()) {
    auto [region, pair] = work.back();
    work.pop_back();
    auto& [wx, wy] = pair;
    const int disc = region_discrepancy(sys, region, wx, wy);
    if (disc < 0) {
      auto comp = completions(sys, region, wx);
      const Configuration& z = comp[rng.below(comp.size())];
      for (int s : region) {
        outx.spins[s] = z.spins[s];
        outy.spins[s] = z.spins[s];
      }
      continue;
    }
    RegionSplit rs = split_region(sys, region, disc);
    auto comp1 = completions(sys, region, wx);
    auto comp2 = completions(sys, region, wy);
    auto psi = maximal_colour_coupling(region_marginal(comp1, rs.root, sys.q),
                                       region_marginal(comp2, rs.root, sys.q));
    // Exact inverse-cdf draw on the rational masses.
    Rational r(rng.next());
    r /= rat_pow(Rational(2), 64);
    Rational cum(0);
    std::pair<int, int> drawn{psi.back().c1, psi.back().c2};
    for (const auto& pm : psi) {
      cum += pm.mass;
      if (r < cum) {
        drawn = {pm.c1, pm.c2};
        break;
      }
    }
    outx.spins[rs.root] = static_cast<std::uint8_t>(drawn.first);
    outy.spins[rs.root] = static_cast<std::uint8_t>(drawn.second);
    Configuration bx = wx, by = wy;
    bx.spins[rs.root] = static_cast<std::uint8_t>(drawn.first);
    by.spins[rs.root] = static_cast<std::uint8_t>(drawn.second);
    for (const auto& child : rs.children) work.push_back({child, {bx, by}});
  }
  return {outx, outy};
}

// ---------------------------------------------------------------------------
// Influence aggregation.

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::EdgeCases: return "edge-cases";
    case Strategy::MinHamming: return "min-hamming";
    case Strategy::MaximalSite: return "maximal-site";
    case Strategy::Identity: return "identity";
    case Strategy::RecursiveTree: return "recursive-tree";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::EdgeCases, Strategy::MinHamming, Strategy::MaximalSite, Strategy::Identity,
                     Strategy::RecursiveTree})
    if (name == strategy_name(s)) return s;
  return std::nullopt;
}

PairInfluence pair_influence(const SpinSystem& sys, const BlockKernel& kernel, Strategy strategy,
                             const Configuration& x, const Configuration& y, int i, const Block& b) {
  validate_pair(sys, x, y, i);
  PairInfluence out;

  // Away from the block and its boundary the two update laws coincide for
  // every kernel here, as does a block-site discrepancy under laws that
  // read only the boundary.
  const bool heatbath = kernel.stationary_on_proper();
  bool touches = b.contains(i);
  if (!touches)
    for (int w : sys.graph.adj[i])
      if (b.contains(w)) {
        touches = true;
        break;
      }
  if (!touches || (b.contains(i) && heatbath)) {
    for (int j : b.sites) out.disagree[j] = Rational(0);
    return out;
  }
  switch (strategy) {
    case Strategy::EdgeCases: {
      if (!heatbath) fail(Errc::StrategyShapeMismatch, "edge case analysis assumes colouring updates");
      EdgeCoupling ec = edge_case_coupling(sys, x, y, i, b);
      out.fired = ec.fired;
      out.swapped = ec.swapped;
      for (int j : b.sites) out.disagree[j] = ec.joint.disagreement_at(j);
      return out;
    }
    case Strategy::RecursiveTree: {
      if (!heatbath) fail(Errc::StrategyShapeMismatch, "subtree recursion assumes colouring updates");
      out.disagree = recursive_tree_disagreement(sys, x, y, i, b);
      return out;
    }
    case Strategy::MaximalSite: {
      if (b.size() != 1) fail(Errc::StrategyShapeMismatch, "site coupling needs one-site blocks");
      SupportDist d1 = uniform_support(kernel.support(sys, x, b));
      SupportDist d2 = uniform_support(kernel.support(sys, y, b));
      Coupling c = maximal_site_coupling(d1, d2, b.sites[0]);
      out.disagree[b.sites[0]] = c.disagreement_at(b.sites[0]);
      return out;
    }
    case Strategy::MinHamming: {
      SupportDist d1 = uniform_support(kernel.support(sys, x, b));
      SupportDist d2 = uniform_support(kernel.support(sys, y, b));
      Coupling c = min_hamming_coupling(d1, d2, b.sites);
      for (int j : b.sites) out.disagree[j] = c.disagreement_at(j);
      return out;
    }
    case Strategy::Identity: {
      SupportDist d1 = uniform_support(kernel.support(sys, x, b));
      SupportDist d2 = uniform_support(kernel.support(sys, y, b));
      Coupling c = identity_coupling(d1, d2);
      for (int j : b.sites) out.disagree[j] = c.disagreement_at(j);
      return out;
    }
  }
  fail(Errc::StrategyShapeMismatch, "unknown strategy");
}

Rational InfluenceReport::rho_at(int k, int i, int j) const {
  auto it = rho.find({k, i, j});
  return it == rho.end() ? Rational(0) : it->second;
}

InfluenceReport influence(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                          const BlockSchedule& schedule, Strategy strategy) {
  InfluenceReport rep;
  rep.strategy = strategy;

  // Shape preconditions, checked before any work.
  for (int k = 0; k < schedule.size(); ++k) {
    const Block& b = schedule.blocks[k];
    switch (strategy) {
      case Strategy::EdgeCases:
        if (b.size() != 2 || !sys.graph.has_edge(b.sites[0], b.sites[1]))
          fail(Errc::NotAnEdgeBlock, "block " + std::to_string(k) + " is not an edge");
        break;
      case Strategy::MaximalSite:
        if (b.size() != 1)
          fail(Errc::StrategyShapeMismatch, "block " + std::to_string(k) + " is not a single site");
        break;
      case Strategy::RecursiveTree:
        for (int i : b.boundary) {
          int touches = 0;
          for (int w : sys.graph.adj[i])
            if (b.contains(w)) ++touches;
          if (touches != 1)
            fail(Errc::NotATreeBlock,
                 "boundary site " + std::to_string(i) + " touches block " + std::to_string(k) + " twice");
        }
        break;
      default:
        break;
    }
  }

  std::map<int, std::vector<std::pair<std::size_t, std::size_t>>> pairs_by_site;
  std::map<std::tuple<int, int, int>, std::pair<std::size_t, std::size_t>> witness_pair;

  for (int k = 0; k < schedule.size(); ++k) {
    const Block& b = schedule.blocks[k];
    // A discrepancy can matter on the boundary always, and on the block
    // itself when the law reads block spins (copy kernels do).
    std::vector<int> relevant = b.boundary;
    if (!kernel.stationary_on_proper()) {
      relevant.insert(relevant.end(), b.sites.begin(), b.sites.end());
      std::sort(relevant.begin(), relevant.end());
    }
    for (int i : relevant)
      for (int j : b.sites) rep.rho[{k, i, j}] = Rational(0);

    // The update laws depend on the pair only through spins the kernel can
    // read, so cache one influence evaluation per signature.
    std::map<std::string, PairInfluence> cache;
    for (int i : relevant) {
      auto pit = pairs_by_site.find(i);
      if (pit == pairs_by_site.end())
        pit = pairs_by_site.emplace(i, exact::discrepancy_pairs(space, i)).first;
      for (const auto& [pa, pb] : pit->second) {
        const Configuration& x = space.configs[pa];
        const Configuration& y = space.configs[pb];
        std::string key;
        key.reserve(b.boundary.size() + b.sites.size() + 8);
        for (int s : b.boundary) key.push_back(static_cast<char>(x.spins[s]));
        if (!kernel.stationary_on_proper())
          for (int s : b.sites) key.push_back(static_cast<char>(x.spins[s]));
        key.push_back(static_cast<char>(i & 0xff));
        key.push_back(static_cast<char>(i >> 8));
        key.push_back(static_cast<char>(y.spins[i]));
        auto cit = cache.find(key);
        if (cit == cache.end())
          cit = cache.emplace(key, pair_influence(sys, kernel, strategy, x, y, i, b)).first;
        const PairInfluence& pi = cit->second;
        ++rep.pair_checks;
        if (strategy == Strategy::EdgeCases) ++rep.case_histogram[edge_case_name(pi.fired)];
        for (int j : b.sites) {
          auto dit = pi.disagree.find(j);
          if (dit == pi.disagree.end()) continue;
          Rational& slot = rep.rho[{k, i, j}];
          if (dit->second > slot) {
            slot = dit->second;
            witness_pair[{k, i, j}] = {pa, pb};
          }
        }
      }
    }
  }

  // alpha: worst weighted column sum over (block, block site).
  std::map<std::pair<int, int>, Rational> column;  // (k, j) -> sum_i w_i/w_j rho
  std::map<int, Rational> site_total;              // j -> sum_{k,i} rho, for the averaged variant
  for (const auto& [key, r] : rep.rho) {
    const auto& [k, i, j] = key;
    column[{k, j}] += sys.weights[i] / sys.weights[j] * r;
    site_total[j] += r;
  }
  for (const auto& [kj, sum] : column)
    if (sum > rep.alpha || rep.alpha_block < 0) {
      rep.alpha = sum;
      rep.alpha_block = kj.first;
      rep.alpha_site = kj.second;
    }
  // Witness: largest weighted contributor at the attaining (block, site).
  if (rep.alpha_block >= 0 && sgn(rep.alpha) > 0) {
    Rational best(-1);
    for (const auto& [key, r] : rep.rho) {
      const auto& [k, i, j] = key;
      if (k != rep.alpha_block || j != rep.alpha_site) continue;
      const Rational c = sys.weights[i] / sys.weights[j] * r;
      if (c > best) {
        best = c;
        rep.witness.k = k;
        rep.witness.i = i;
        rep.witness.j = j;
      }
    }
    auto wit = witness_pair.find({rep.witness.k, rep.witness.i, rep.witness.j});
    if (wit != witness_pair.end()) {
      rep.witness.x = space.configs[wit->second.first];
      rep.witness.y = space.configs[wit->second.second];
      rep.witness.valid = true;
    }
  }

  // Block-averaged variant: unweighted, normalised by cover counts.
  for (const auto& [j, sum] : site_total) {
    const auto& covering = schedule.blocks_containing[j];
    if (covering.empty()) continue;
    const Rational avg = sum / static_cast<unsigned long>(covering.size());
    if (avg > rep.alpha_weitz) rep.alpha_weitz = avg;
  }
  return rep;
}

}  // namespace scanmix::coupling
