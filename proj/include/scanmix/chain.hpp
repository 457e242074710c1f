#pragma once

#include <cstdint>
#include <vector>

#include "scanmix/kernel.hpp"

namespace scanmix {

// Sampled trajectory state. Each block update draws from a substream keyed
// by (sweep, block), so trajectories replay identically regardless of how
// many draws any single update consumed.
struct ChainState {
  Configuration current;
  CounterRng rng;
  std::uint64_t sweeps_done = 0;
};

ChainState start_chain(const SpinSystem& sys, std::uint64_t seed);
ChainState start_chain_at(const SpinSystem& sys, Configuration start, std::uint64_t seed);

// One full sweep, blocks in schedule order. Verifies that every update
// leaves the off-block spins untouched and the state legal.
void apply_scan(const SpinSystem& sys, const BlockSchedule& schedule, const BlockKernel& kernel,
                ChainState& state);

// Trajectory of sweeps+1 configurations, starting configuration included.
std::vector<Configuration> simulate(const SpinSystem& sys, const BlockSchedule& schedule,
                                    const BlockKernel& kernel, ChainState state, long sweeps);

}  // namespace scanmix
