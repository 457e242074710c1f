#include "scanmix/configuration.hpp"

#include <sstream>

#include "scanmix/errors.hpp"

namespace scanmix {

std::uint64_t pack_index(const Configuration& c, int q) {
  std::uint64_t idx = 0;
  for (std::uint8_t s : c.spins) idx = idx * static_cast<std::uint64_t>(q) + s;
  return idx;
}

Configuration unpack_index(std::uint64_t idx, int n, int q) {
  Configuration c;
  c.spins.assign(n, 0);
  for (int j = n - 1; j >= 0; --j) {
    c.spins[j] = static_cast<std::uint8_t>(idx % q);
    idx /= q;
  }
  return c;
}

std::uint64_t domain_cardinality(int n, int q, std::uint64_t cap) {
  if (n <= 0 || q <= 0) fail(Errc::ParamOutOfRange, "need n >= 1 and q >= 1");
  std::uint64_t total = 1;
  for (int j = 0; j < n; ++j) {
    if (total > cap / static_cast<std::uint64_t>(q))
      fail(Errc::StateSpaceTooLarge,
           "q^n exceeds cap " + std::to_string(cap) + " (n=" + std::to_string(n) +
               ", q=" + std::to_string(q) + ")");
    total *= static_cast<std::uint64_t>(q);
  }
  if (total > cap)
    fail(Errc::StateSpaceTooLarge, "q^n exceeds cap " + std::to_string(cap));
  return total;
}

std::string render_config(const Configuration& c) {
  std::ostringstream out;
  for (int j = 0; j < c.size(); ++j) {
    if (j) out << ' ';
    out << static_cast<int>(c.spins[j]) + 1;
  }
  return out.str();
}

Configuration parse_config(const std::string& text, int n, int q) {
  std::string cleaned = text;
  for (char& ch : cleaned)
    if (ch == ',') ch = ' ';
  std::istringstream in(cleaned);
  Configuration c;
  long v;
  while (in >> v) {
    if (v < 1 || v > q) fail(Errc::IndexOutOfRange, "spin " + std::to_string(v) + " not in 1.." + std::to_string(q));
    c.spins.push_back(static_cast<std::uint8_t>(v - 1));
  }
  std::string rest;
  if (in.clear(), in >> rest) fail(Errc::ParseError, "trailing garbage '" + rest + "' in configuration");
  if (c.size() != n)
    fail(Errc::ParseError, "configuration has " + std::to_string(c.size()) + " spins, expected " + std::to_string(n));
  return c;
}

}  // namespace scanmix
