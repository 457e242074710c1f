#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scanmix {

// Spin assignment, one value in 0..q-1 per site. Spins are 0-based in
// memory; rendering and parsing shift to 1-based for human IO.
struct Configuration {
  std::vector<std::uint8_t> spins;

  int size() const { return static_cast<int>(spins.size()); }
  bool operator==(const Configuration&) const = default;
  bool operator<(const Configuration& o) const { return spins < o.spins; }
};

// Mixed-radix rank with site 0 most significant, so ascending index order
// equals lexicographic order on spin vectors.
std::uint64_t pack_index(const Configuration& c, int q);
Configuration unpack_index(std::uint64_t idx, int n, int q);

// q^n, guarded against overflow past `cap`.
std::uint64_t domain_cardinality(int n, int q, std::uint64_t cap);

std::string render_config(const Configuration& c);                        // "1 3 2"
Configuration parse_config(const std::string& text, int n, int q);        // 1-based spins

}  // namespace scanmix
