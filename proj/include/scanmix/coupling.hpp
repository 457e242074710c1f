#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "scanmix/exact.hpp"
#include "scanmix/kernel.hpp"
#include "scanmix/rational.hpp"
#include "scanmix/spin_system.hpp"

namespace scanmix::coupling {

// Update law as an explicit support plus exact masses. Supports are kept in
// ascending packed order; all kernels here are uniform so the masses are
// 1/size each, but the struct allows general weights for conditionals.
struct SupportDist {
  std::vector<Configuration> support;
  std::vector<Rational> mass;

  std::size_t size() const { return support.size(); }
};

SupportDist uniform_support(const UpdateSupport& us);

// Joint law over pairs of outcomes whose marginals are `a` and `b`.
struct Coupling {
  SupportDist a, b;
  struct Entry {
    std::uint32_t ia, ib;
    Rational mass;
  };
  std::vector<Entry> entries;  // ascending (ia, ib), masses positive

  Rational disagreement_at(int site) const;
  // Exact marginal audit; throws MarginalMismatch when a row or column sum
  // deviates from the declared mass.
  void check_marginals() const;
};

// Couples the spin at `site`, largest shared mass first: diagonal mass
// min(p,p'), residuals matched in ascending colour order. The disagreement
// probability equals the total variation distance of the two laws.
Coupling maximal_site_coupling(const SupportDist& d1, const SupportDist& d2, int site);

// Exact minimiser of the expected Hamming distance across `sites`
// (successive shortest augmenting paths on the transport polytope).
Coupling min_hamming_coupling(const SupportDist& d1, const SupportDist& d2, const std::vector<int>& sites);

// Index-aligned pairing of two equal-size uniform supports.
Coupling identity_coupling(const SupportDist& d1, const SupportDist& d2);

// Which construction an edge-block discrepancy pair was routed to. The
// triangle cases read the spins of the other boundary sites: "mark1" means
// some boundary neighbour (besides the discrepancy site) carries the old
// discrepancy spin, "mark2" the new one.
enum class EdgeCase {
  OffBoundary,        // i not adjacent to the block: laws identical
  OneEndpoint,        // i adjacent to one endpoint: greedy there, then conditionals
  TriangleClean,      // both endpoints adjacent, no marks: exact relabelling bijection
  TriangleOneSided,   // mark1 at one endpoint only: greedy at the marked endpoint first
  TriangleOpposed,    // mark1 at one endpoint, mark2 at the other: paired remainders
  TriangleBothDirty,  // mark1 at both endpoints: quota-spread remainders
};

const char* edge_case_name(EdgeCase c);

struct EdgeCoupling {
  Coupling joint;
  EdgeCase fired = EdgeCase::OffBoundary;
  bool swapped = false;  // matched only after exchanging the two laws
  // Per-site disagreement ceilings implied by the fired case, and the
  // weaker ceiling 1/(q-D) + 1/(q-D)^2 that holds for every triangle case.
  std::map<int, Rational> case_bound;
  Rational blanket_bound;
};

// Coupling of the two heat-bath update laws of an edge block for a pair of
// configurations differing at exactly one site.
EdgeCoupling edge_case_coupling(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i,
                                const Block& b);

// Exact joint for a subtree block: couple the spin at the site nearest the
// discrepancy, then recurse independently into the child subtrees.
Coupling recursive_tree_coupling(const SpinSystem& sys, const Configuration& x, const Configuration& y, int i,
                                 const Block& b);

// Same recursion, returning only per-site disagreement probabilities.
std::map<int, Rational> recursive_tree_disagreement(const SpinSystem& sys, const Configuration& x,
                                                    const Configuration& y, int i, const Block& b);

// Draw one coupled outcome pair along the recursion without materialising
// the joint law.
std::pair<Configuration, Configuration> sample_tree_coupling(const SpinSystem& sys, const Configuration& x,
                                                             const Configuration& y, int i, const Block& b,
                                                             CounterRng& rng);

enum class Strategy { EdgeCases, MinHamming, MaximalSite, Identity, RecursiveTree };

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& name);

// Disagreement probabilities of one coupled update for one discrepancy pair.
struct PairInfluence {
  std::map<int, Rational> disagree;  // block sites only
  EdgeCase fired = EdgeCase::OffBoundary;
  bool swapped = false;
};

PairInfluence pair_influence(const SpinSystem& sys, const BlockKernel& kernel, Strategy strategy,
                             const Configuration& x, const Configuration& y, int i, const Block& b);

struct Witness {
  int k = -1, i = -1, j = -1;
  Configuration x, y;
  bool valid = false;
};

// rho[k][i][j]: worst coupled disagreement at block site j of block k over
// all legal pairs differing at boundary site i. Sites off the boundary
// couple identically and are omitted (zero).
struct InfluenceReport {
  Strategy strategy = Strategy::Identity;
  std::map<std::tuple<int, int, int>, Rational> rho;
  Rational alpha{0};
  Rational alpha_weitz{0};
  int alpha_block = -1;
  int alpha_site = -1;
  Witness witness;
  std::map<std::string, long> case_histogram;
  long pair_checks = 0;

  Rational rho_at(int k, int i, int j) const;
};

InfluenceReport influence(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                          const BlockSchedule& schedule, Strategy strategy);

}  // namespace scanmix::coupling
