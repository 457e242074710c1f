#include "scanmix/chain.hpp"

#include "scanmix/errors.hpp"

namespace scanmix {

ChainState start_chain(const SpinSystem& sys, std::uint64_t seed) {
  return start_chain_at(sys, smallest_legal_config(sys), seed);
}

ChainState start_chain_at(const SpinSystem& sys, Configuration start, std::uint64_t seed) {
  if (start.size() != sys.n()) fail(Errc::DomainMismatch, "start configuration has wrong length");
  for (std::uint8_t s : start.spins)
    if (static_cast<int>(s) >= sys.q) fail(Errc::IndexOutOfRange, "start spin out of range");
  if (!sys.legal(start)) fail(Errc::DomainMismatch, "start configuration is not a proper colouring");
  ChainState st;
  st.current = std::move(start);
  st.rng = CounterRng(seed);
  st.sweeps_done = 0;
  return st;
}

void apply_scan(const SpinSystem& sys, const BlockSchedule& schedule, const BlockKernel& kernel,
                ChainState& state) {
  const std::uint64_t m = schedule.blocks.size();
  for (std::uint64_t k = 0; k < m; ++k) {
    const Block& b = schedule.blocks[k];
    CounterRng sub = state.rng.split(state.sweeps_done * m + k);
    Configuration next = kernel.sample(sys, state.current, b, sub);
    // The update may only touch block sites.
    for (int j = 0; j < sys.n(); ++j)
      if (next.spins[j] != state.current.spins[j] && !b.contains(j))
        fail(Errc::Infeasible, "kernel wrote outside its block");
    if (!sys.legal(next)) fail(Errc::Infeasible, "kernel left the legal state space");
    state.current = std::move(next);
  }
  ++state.sweeps_done;
}

std::vector<Configuration> simulate(const SpinSystem& sys, const BlockSchedule& schedule,
                                    const BlockKernel& kernel, ChainState state, long sweeps) {
  if (sweeps < 0) fail(Errc::ParamOutOfRange, "negative sweep count");
  std::vector<Configuration> trajectory;
  trajectory.reserve(sweeps + 1);
  trajectory.push_back(state.current);
  for (long t = 0; t < sweeps; ++t) {
    apply_scan(sys, schedule, kernel, state);
    trajectory.push_back(state.current);
  }
  return trajectory;
}

}  // namespace scanmix
