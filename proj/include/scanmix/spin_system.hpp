#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scanmix/configuration.hpp"
#include "scanmix/graph.hpp"
#include "scanmix/rational.hpp"

namespace scanmix {

// A q-spin system on a graph. When `restrict_to_proper` is set the legal
// state space is the proper colourings; otherwise all q^n assignments.
// Site weights enter influence aggregation only, never the dynamics.
struct SpinSystem {
  Graph graph;
  int q = 0;
  bool restrict_to_proper = true;
  std::vector<Rational> weights;  // positive, size n

  int n() const { return graph.n; }
  bool is_proper(const Configuration& c) const;
  bool legal(const Configuration& c) const { return !restrict_to_proper || is_proper(c); }
};

SpinSystem make_system(Graph g, int q, bool restrict_to_proper = true);
void set_weights(SpinSystem& sys, std::vector<Rational> w);

// Enumerated legal domain in ascending packed-index order (equivalently,
// lexicographic spin order). position() inverts the enumeration.
struct StateSpace {
  bool restricted = true;
  int n = 0;
  int q = 0;
  std::vector<Configuration> configs;
  std::vector<std::uint64_t> packed;  // strictly ascending

  std::size_t size() const { return configs.size(); }
  std::size_t position(std::uint64_t packed_idx) const;  // DomainMismatch if absent
};

constexpr std::uint64_t kDefaultEnumCap = 1'000'000;

StateSpace enumerate_configs(const SpinSystem& sys, std::uint64_t cap = kDefaultEnumCap);

// Lexicographically smallest legal configuration; the default start state.
Configuration smallest_legal_config(const SpinSystem& sys);

// One line per site: "p" or "p/q", all positive.
std::vector<Rational> read_weights_file(const std::string& path, int n);

}  // namespace scanmix
