#include "scanmix/kernel.hpp"

#include <algorithm>

#include "scanmix/errors.hpp"

namespace scanmix {

Configuration BlockKernel::sample(const SpinSystem& sys, const Configuration& x, const Block& b,
                                  CounterRng& rng) const {
  UpdateSupport s = support(sys, x, b);
  return s.outcomes[rng.below(s.size())];
}

UpdateSupport HeatBathKernel::support(const SpinSystem& sys, const Configuration& x, const Block& b) const {
  const int bs = b.size();
  // Per block site: frozen neighbour spins (outside the block) and the
  // positions of earlier block sites among its neighbours.
  std::vector<std::vector<int>> frozen(bs), earlier(bs);
  for (int t = 0; t < bs; ++t) {
    const int j = b.sites[t];
    for (int w : sys.graph.adj[j]) {
      auto it = std::lower_bound(b.sites.begin(), b.sites.end(), w);
      if (it != b.sites.end() && *it == w) {
        const int pos = static_cast<int>(it - b.sites.begin());
        if (pos < t) earlier[t].push_back(pos);
      } else {
        frozen[t].push_back(x.spins[w]);
      }
    }
  }

  UpdateSupport out;
  Configuration y = x;
  std::vector<int> pick(bs, -1);
  int t = 0;
  // Lexicographic backtracking over block assignments; block sites are in
  // ascending site order, so outcomes arrive in ascending packed order.
  while (t >= 0) {
    if (t == bs) {
      out.outcomes.push_back(y);
      --t;
      continue;
    }
    bool placed = false;
    for (int s = pick[t] + 1; s < sys.q; ++s) {
      bool ok = true;
      for (int f : frozen[t])
        if (f == s) {
          ok = false;
          break;
        }
      if (ok)
        for (int pos : earlier[t])
          if (y.spins[b.sites[pos]] == s) {
            ok = false;
            break;
          }
      if (ok) {
        pick[t] = s;
        y.spins[b.sites[t]] = static_cast<std::uint8_t>(s);
        placed = true;
        break;
      }
    }
    if (placed) {
      ++t;
      if (t < bs) pick[t] = -1;
    } else {
      pick[t] = -1;
      --t;
    }
  }
  if (out.outcomes.empty())
    fail(Errc::EmptySupport, "no block completion; boundary spins exhaust the palette");
  return out;
}

std::pair<int, int> CopyShiftKernel::orient(const Block& b) const {
  if (b.size() != 2) fail(Errc::NotAnEdgeBlock, "ring blocks are consecutive pairs");
  const int a = b.sites[0], c = b.sites[1];
  if ((a + 1) % ring_n_ == c) return {a, c};
  if ((c + 1) % ring_n_ == a) return {c, a};
  fail(Errc::NotAnEdgeBlock, "block is not a consecutive ring pair");
}

UpdateSupport CopyShiftKernel::support(const SpinSystem& sys, const Configuration& x, const Block& b) const {
  auto [src, dst] = orient(b);
  UpdateSupport out;
  Configuration y = x;
  y.spins[dst] = x.spins[src];
  // Outcomes ordered by the fresh spin at src; that is ascending packed
  // order because dst is fixed across outcomes.
  for (int s = 0; s < sys.q; ++s) {
    y.spins[src] = static_cast<std::uint8_t>(s);
    out.outcomes.push_back(y);
  }
  return out;
}

}  // namespace scanmix
