#pragma once

#include <memory>
#include <vector>

#include "scanmix/blocks.hpp"
#include "scanmix/configuration.hpp"
#include "scanmix/rng.hpp"
#include "scanmix/spin_system.hpp"

namespace scanmix {

// Outcomes of one block update started from a fixed configuration. Every
// kernel here is uniform over its support, so a count is all the mass
// bookkeeping needed. Outcomes are in ascending packed order and agree with
// the start configuration off the block.
struct UpdateSupport {
  std::vector<Configuration> outcomes;

  std::size_t size() const { return outcomes.size(); }
};

class BlockKernel {
 public:
  virtual ~BlockKernel() = default;
  virtual const char* name() const = 0;
  virtual UpdateSupport support(const SpinSystem& sys, const Configuration& x, const Block& b) const = 0;
  // True when the stationary law is uniform over proper colourings rather
  // than over the full product space.
  virtual bool stationary_on_proper() const = 0;

  Configuration sample(const SpinSystem& sys, const Configuration& x, const Block& b, CounterRng& rng) const;
};

// Resample the block uniformly over local proper completions: spins inside
// the block must avoid each other across internal edges and avoid the frozen
// boundary spins. Throws EmptySupport when no completion exists.
class HeatBathKernel final : public BlockKernel {
 public:
  const char* name() const override { return "heat-bath"; }
  UpdateSupport support(const SpinSystem& sys, const Configuration& x, const Block& b) const override;
  bool stationary_on_proper() const override { return true; }
};

// Ring shift rule on the n-cycle with blocks {i, i+1 mod n}: the old spin of
// i is written to i+1, then i redraws uniformly from all q spins. The
// uniform law on the full product space is invariant for every block.
class CopyShiftKernel final : public BlockKernel {
 public:
  explicit CopyShiftKernel(int ring_n) : ring_n_(ring_n) {}
  const char* name() const override { return "copy-shift"; }
  UpdateSupport support(const SpinSystem& sys, const Configuration& x, const Block& b) const override;
  bool stationary_on_proper() const override { return false; }

  // (src, dst) for a ring pair block, dst = src+1 mod n.
  std::pair<int, int> orient(const Block& b) const;

 private:
  int ring_n_;
};

}  // namespace scanmix
