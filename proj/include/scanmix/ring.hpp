#pragma once

#include <tuple>
#include <vector>

#include "scanmix/blocks.hpp"
#include "scanmix/kernel.hpp"
#include "scanmix/rational.hpp"
#include "scanmix/spin_system.hpp"

namespace scanmix::ring {

// n-cycle with overlapping two-site blocks {k, k+1 mod n}, scanned in order,
// each updated by the shift kernel: copy the old spin forward, redraw the
// source uniformly. No properness restriction; the uniform law on all
// configurations is invariant for every block, yet a full scan never mixes.
struct RingSystem {
  SpinSystem sys;
  BlockSchedule schedule;
  CopyShiftKernel kernel;

  RingSystem(SpinSystem s, BlockSchedule sched, int n) : sys(std::move(s)), schedule(std::move(sched)), kernel(n) {}
};

RingSystem make_ring(int n, int q);

// Influence table from the shift structure: a discrepancy at the source of
// block k lands on its target with certainty, everything else couples away.
struct RingInfluence {
  int n, q;
  Rational alpha;        // weighted scan estimate, equals one
  Rational alpha_weitz;  // block-averaged estimate, equals one half
  // Nonzero influence entries (k, i, j, value); all carry value one.
  std::vector<std::tuple<int, int, int, Rational>> nonzero;
};

RingInfluence ring_influence(int n, int q);

// Simulation plus exact evidence that the scan is stuck: the spin at site 0
// after each full scan, whether it ever moved, and the exact worst-start
// total variation after each of the first `exact_horizon` scans (computed
// when the state space is small enough to enumerate).
struct NonMixingReport {
  int n, q;
  long scans;
  std::uint64_t seed;
  bool site_zero_constant;
  int site_zero_spin;  // 0-based spin pinned at site 0
  std::vector<Rational> scan_tv;     // worst-start TV after scan t+1
  Rational tv_floor;                 // 1 - 1/q, the provable lower bound
  bool floor_holds;                  // every scan_tv entry >= tv_floor
  std::vector<Rational> mixture_tv;  // same horizon, uniformly mixed single-block chain
};

NonMixingReport demonstrate_nonmixing(int n, int q, long scans, std::uint64_t seed, int exact_horizon);

}  // namespace scanmix::ring
