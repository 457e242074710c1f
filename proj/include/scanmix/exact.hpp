#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scanmix/dense.hpp"
#include "scanmix/kernel.hpp"
#include "scanmix/spin_system.hpp"

namespace scanmix::exact {

// Identifies the enumeration a vector of masses lives on; mismatched tags
// refuse to be compared instead of silently misaligning.
struct DomainTag {
  bool restricted = true;
  int n = 0;
  int q = 0;
  std::size_t size = 0;

  bool operator==(const DomainTag&) const = default;
};

inline DomainTag tag_of(const StateSpace& space) {
  return DomainTag{space.restricted, space.n, space.q, space.size()};
}

template <class S>
struct Distribution {
  DomainTag tag;
  std::vector<S> mass;
};

// Stationary law of a kernel over the enumerated domain: uniform over proper
// colourings for heat-bath style kernels, uniform over everything otherwise.
template <class S>
Distribution<S> stationary(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel);

template <class S>
S tv_distance(const Distribution<S>& a, const Distribution<S>& b);

// One block update as a sparse row-uniform kernel over the domain.
RowUniformKernel block_kernel_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                                     const Block& b);

std::vector<RowUniformKernel> schedule_kernels(const SpinSystem& sys, const StateSpace& space,
                                               const BlockKernel& kernel, const BlockSchedule& schedule);

// Dense |D| x |D| matrix of one block update or one full sweep. Guarded by
// `max_domain` because the result is dense in the domain squared.
template <class S>
DenseMatrix<S> block_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                            const Block& b, std::size_t max_domain = 4096);

template <class S>
DenseMatrix<S> scan_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                           const BlockSchedule& schedule, std::size_t max_domain = 4096);

// Uniform mixture of the block updates (random single-block dynamics).
template <class S>
DenseMatrix<S> average_kernel_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                                     const BlockSchedule& schedule, std::size_t max_domain = 4096);

// tv(pi P_k, pi) per block; exact zero certifies invariance.
template <class S>
std::vector<S> invariance_residuals(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                                    const BlockSchedule& schedule);

enum class MixStatus { Mixed, NonErgodic, HitScanLimit };

const char* mix_status_name(MixStatus s);

struct MixOptions {
  double eps = 0.01;
  long max_scans = 10000;
  // Consecutive sweeps with an unchanged worst-start distance before the
  // curve is declared stuck above eps. 0 disables the check.
  int plateau_window = 25;
  std::size_t max_domain = 4096;
};

template <class S>
struct MixResult {
  MixStatus status = MixStatus::HitScanLimit;
  long mixing_time = -1;       // first sweep count with worst-start tv <= eps
  std::vector<S> curve;        // worst-start tv after sweep t, t = 1,2,...
};

// Worst-start distance to stationarity, advanced one sweep at a time by
// running all start rows simultaneously. Per-start distances only shrink
// under an invariant kernel, so the first sweep under eps is the mixing
// time.
template <class S>
MixResult<S> mixing_time(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                         const BlockSchedule& schedule, const MixOptions& opt);

// |f(x) - f(y)| maxima over one-site discrepancies, and their weighted sum.
struct FunctionalReport {
  std::vector<double> site_deltas;
  double total = 0;  // sum of w_i * delta_i
};

FunctionalReport functional_deltas(const SpinSystem& sys, const StateSpace& space, const std::vector<double>& f);

// Delta(P f) / Delta(f) for one sweep; DegenerateFunctional when Delta(f)=0.
double contraction_ratio(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                         const BlockSchedule& schedule, const std::vector<double>& f);

// Ordered pairs of domain configurations that differ exactly at site i.
std::vector<std::pair<std::size_t, std::size_t>> discrepancy_pairs(const StateSpace& space, int i);

}  // namespace scanmix::exact
