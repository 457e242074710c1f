#include "scanmix/ring.hpp"

#include <utility>

#include "scanmix/chain.hpp"
#include "scanmix/errors.hpp"
#include "scanmix/exact.hpp"

namespace scanmix::ring {

RingSystem make_ring(int n, int q) {
  if (n < 3) fail(Errc::ParamOutOfRange, "ring needs at least three sites");
  if (q < 2) fail(Errc::ParamOutOfRange, "need at least two spins");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int s = 0; s < n; ++s) edges.emplace_back(s, (s + 1) % n);
  SpinSystem sys = make_system(build_graph(n, edges), q, /*restrict_to_proper=*/false);
  std::vector<std::vector<int>> blocks;
  blocks.reserve(n);
  for (int s = 0; s < n; ++s) blocks.push_back({s, (s + 1) % n});
  BlockSchedule sched = make_schedule(sys.graph, blocks);
  return RingSystem(std::move(sys), std::move(sched), n);
}

RingInfluence ring_influence(int n, int q) {
  if (n < 3) fail(Errc::ParamOutOfRange, "ring needs at least three sites");
  if (q < 2) fail(Errc::ParamOutOfRange, "need at least two spins");
  RingInfluence out;
  out.n = n;
  out.q = q;
  // Block k redraws site k and writes the old spin of k onto k+1. A
  // discrepancy at k therefore lands on k+1 with certainty; discrepancies
  // anywhere else never enter the update law.
  for (int k = 0; k < n; ++k) out.nonzero.emplace_back(k, k, (k + 1) % n, Rational(1));
  // Column sums: site j receives exactly one unit, from block j-1.
  out.alpha = Rational(1);
  // Each site sits in two blocks; the unit splits across them.
  out.alpha_weitz = make_ratio(1, 2);
  return out;
}

NonMixingReport demonstrate_nonmixing(int n, int q, long scans, std::uint64_t seed, int exact_horizon) {
  RingSystem ring = make_ring(n, q);
  NonMixingReport rep;
  rep.n = n;
  rep.q = q;
  rep.scans = scans;
  rep.seed = seed;
  rep.tv_floor = Rational(1) - make_ratio(1, q);

  // Simulation: the spin at site 0 survives every full scan, because block
  // n-1 writes the pre-scan spin of site n-1 back onto site 0 and that spin
  // was itself copied forward around the ring.
  ChainState st = start_chain(ring.sys, seed);
  rep.site_zero_spin = st.current.spins[0];
  rep.site_zero_constant = true;
  for (long t = 0; t < scans; ++t) {
    apply_scan(ring.sys, ring.schedule, ring.kernel, st);
    if (st.current.spins[0] != rep.site_zero_spin) rep.site_zero_constant = false;
  }

  // Exact part: run every start at once and track the worst-start distance
  // to the invariant law. The comparator replaces the sweep by a uniformly
  // mixed single-block move, which does converge.
  if (exact_horizon > 0) {
    StateSpace space = enumerate_configs(ring.sys);
    if (space.size() > 4096) fail(Errc::StateSpaceTooLarge, "exact horizon needs at most 4096 configurations");
    auto ks = exact::schedule_kernels(ring.sys, space, ring.kernel, ring.schedule);
    auto pi = exact::stationary<Rational>(ring.sys, space, ring.kernel);
    const std::size_t N = space.size();

    DenseMatrix<Rational> sweep = DenseMatrix<Rational>::identity(N);
    for (int t = 0; t < exact_horizon; ++t) {
      for (const auto& k : ks) kernels::apply_right(sweep, k);
      rep.scan_tv.push_back(kernels::max_row_tv(sweep, pi.mass));
    }

    DenseMatrix<Rational> mixed = DenseMatrix<Rational>::identity(N);
    const Rational share = make_ratio(1, static_cast<long>(ks.size()));
    for (int t = 0; t < exact_horizon; ++t) {
      DenseMatrix<Rational> next(N, N);
      for (const auto& k : ks) {
        DenseMatrix<Rational> term = mixed;
        kernels::apply_right(term, k);
        for (std::size_t idx = 0; idx < next.a.size(); ++idx) next.a[idx] += term.a[idx];
      }
      for (auto& v : next.a) v *= share;
      mixed = std::move(next);
      rep.mixture_tv.push_back(kernels::max_row_tv(mixed, pi.mass));
    }
  }
  rep.floor_holds = true;
  for (const Rational& d : rep.scan_tv)
    if (d < rep.tv_floor) rep.floor_holds = false;
  return rep;
}

}  // namespace scanmix::ring
