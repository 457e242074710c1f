#include "scanmix/spin_system.hpp"

#include <algorithm>
#include <fstream>

#include "scanmix/errors.hpp"

namespace scanmix {

bool SpinSystem::is_proper(const Configuration& c) const {
  for (int u = 0; u < graph.n; ++u)
    for (int v : graph.adj[u])
      if (u < v && c.spins[u] == c.spins[v]) return false;
  return true;
}

SpinSystem make_system(Graph g, int q, bool restrict_to_proper) {
  if (q < 1) fail(Errc::ParamOutOfRange, "q must be >= 1");
  if (q > 255) fail(Errc::ParamOutOfRange, "q must fit a byte");
  SpinSystem sys;
  sys.graph = std::move(g);
  sys.q = q;
  sys.restrict_to_proper = restrict_to_proper;
  sys.weights.assign(sys.graph.n, Rational(1));
  return sys;
}

void set_weights(SpinSystem& sys, std::vector<Rational> w) {
  if (static_cast<int>(w.size()) != sys.n())
    fail(Errc::ParamOutOfRange, "want " + std::to_string(sys.n()) + " weights");
  for (const Rational& x : w)
    if (sgn(x) <= 0) fail(Errc::ParamOutOfRange, "weights must be positive");
  sys.weights = std::move(w);
}

std::size_t StateSpace::position(std::uint64_t packed_idx) const {
  auto it = std::lower_bound(packed.begin(), packed.end(), packed_idx);
  if (it == packed.end() || *it != packed_idx)
    fail(Errc::DomainMismatch, "configuration not in enumerated domain");
  return static_cast<std::size_t>(it - packed.begin());
}

namespace {

// Depth-first lexicographic enumeration. For the proper-colouring domain the
// partial assignment is pruned as soon as an edge goes monochromatic, so the
// walk touches only viable prefixes.
void enumerate_rec(const SpinSystem& sys, Configuration& c, int site, StateSpace& out) {
  const int n = sys.n();
  if (site == n) {
    out.configs.push_back(c);
    out.packed.push_back(pack_index(c, sys.q));
    return;
  }
  for (int s = 0; s < sys.q; ++s) {
    c.spins[site] = static_cast<std::uint8_t>(s);
    bool ok = true;
    if (sys.restrict_to_proper) {
      for (int w : sys.graph.adj[site])
        if (w < site && c.spins[w] == c.spins[site]) {
          ok = false;
          break;
        }
    }
    if (ok) enumerate_rec(sys, c, site + 1, out);
  }
}

}  // namespace

StateSpace enumerate_configs(const SpinSystem& sys, std::uint64_t cap) {
  domain_cardinality(sys.n(), sys.q, cap);  // throws when q^n exceeds cap
  StateSpace space;
  space.restricted = sys.restrict_to_proper;
  space.n = sys.n();
  space.q = sys.q;
  Configuration c;
  c.spins.assign(sys.n(), 0);
  enumerate_rec(sys, c, 0, space);
  if (space.configs.empty())
    fail(Errc::UncolourableGraph, "no legal configuration with q = " + std::to_string(sys.q));
  return space;
}

Configuration smallest_legal_config(const SpinSystem& sys) {
  const int n = sys.n();
  Configuration c;
  c.spins.assign(n, 0);
  if (!sys.restrict_to_proper) return c;
  // Greedy backtracking; first completed assignment is the lexicographic min.
  int site = 0;
  std::vector<int> choice(n, -1);
  while (site < n) {
    bool placed = false;
    for (int s = choice[site] + 1; s < sys.q; ++s) {
      bool ok = true;
      for (int w : sys.graph.adj[site])
        if (w < site && c.spins[w] == s) {
          ok = false;
          break;
        }
      if (ok) {
        c.spins[site] = static_cast<std::uint8_t>(s);
        choice[site] = s;
        placed = true;
        break;
      }
    }
    if (placed) {
      ++site;
    } else {
      choice[site] = -1;
      --site;
      if (site < 0) fail(Errc::UncolourableGraph, "no proper colouring with q = " + std::to_string(sys.q));
    }
  }
  return c;
}

std::vector<Rational> read_weights_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::vector<Rational> w;
  std::string line;
  while (std::getline(in, line)) {
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(a, b - a + 1);
    if (tok[0] == '#') continue;
    Rational r = parse_rational(tok);
    if (sgn(r) <= 0) fail(Errc::ParamOutOfRange, path + ": weight '" + tok + "' is not positive");
    w.push_back(std::move(r));
  }
  if (static_cast<int>(w.size()) != n)
    fail(Errc::ParseError, path + ": want " + std::to_string(n) + " weights, found " + std::to_string(w.size()));
  return w;
}

}  // namespace scanmix
