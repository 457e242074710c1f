#include "scanmix/exact.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "scanmix/errors.hpp"

namespace scanmix::exact {

const char* mix_status_name(MixStatus s) {
  switch (s) {
    case MixStatus::Mixed: return "mixed";
    case MixStatus::NonErgodic: return "non-ergodic";
    case MixStatus::HitScanLimit: return "hit-scan-limit";
  }
  return "?";
}

template <class S>
Distribution<S> stationary(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel) {
  Distribution<S> pi;
  pi.tag = tag_of(space);
  pi.mass.assign(space.size(), S(0));
  if (kernel.stationary_on_proper()) {
    if (space.restricted) {
      for (auto& v : pi.mass) v = S(1) / static_cast<unsigned long>(space.size());
    } else {
      // Full product enumeration: stationary mass sits on the proper subset.
      std::size_t proper = 0;
      std::vector<char> ok(space.size(), 0);
      for (std::size_t p = 0; p < space.size(); ++p)
        if (sys.is_proper(space.configs[p])) {
          ok[p] = 1;
          ++proper;
        }
      if (proper == 0) fail(Errc::UncolourableGraph, "no proper colouring in domain");
      for (std::size_t p = 0; p < space.size(); ++p)
        if (ok[p]) pi.mass[p] = S(1) / static_cast<unsigned long>(proper);
    }
  } else {
    if (space.restricted)
      fail(Errc::DomainMismatch, std::string(kernel.name()) + " kernel needs the unrestricted domain");
    for (auto& v : pi.mass) v = S(1) / static_cast<unsigned long>(space.size());
  }
  return pi;
}

template <class S>
S tv_distance(const Distribution<S>& a, const Distribution<S>& b) {
  if (!(a.tag == b.tag)) fail(Errc::DomainMismatch, "distributions on different domains");
  S sum(0);
  for (std::size_t p = 0; p < a.mass.size(); ++p) sum += scalar_abs(a.mass[p] - b.mass[p]);
  sum /= 2u;
  return sum;
}

RowUniformKernel block_kernel_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                                     const Block& b) {
  RowUniformKernel k;
  k.rows = k.cols = space.size();
  k.row_ptr.assign(space.size() + 1, 0);
  for (std::size_t r = 0; r < space.size(); ++r) {
    UpdateSupport s = kernel.support(sys, space.configs[r], b);
    for (const Configuration& y : s.outcomes)
      k.col.push_back(static_cast<std::uint32_t>(space.position(pack_index(y, space.q))));
    k.row_ptr[r + 1] = k.col.size();
  }
  return k;
}

std::vector<RowUniformKernel> schedule_kernels(const SpinSystem& sys, const StateSpace& space,
                                               const BlockKernel& kernel, const BlockSchedule& schedule) {
  std::vector<RowUniformKernel> ks;
  ks.reserve(schedule.blocks.size());
  for (const Block& b : schedule.blocks) ks.push_back(block_kernel_matrix(sys, space, kernel, b));
  return ks;
}

namespace {

void check_dense_cap(std::size_t size, std::size_t max_domain) {
  if (size > max_domain)
    fail(Errc::StateSpaceTooLarge, "dense form over " + std::to_string(size) + " states exceeds cap " +
                                       std::to_string(max_domain));
}

}  // namespace

template <class S>
DenseMatrix<S> block_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                            const Block& b, std::size_t max_domain) {
  check_dense_cap(space.size(), max_domain);
  RowUniformKernel k = block_kernel_matrix(sys, space, kernel, b);
  DenseMatrix<S> m(space.size(), space.size());
  for (std::size_t r = 0; r < space.size(); ++r) {
    const S share = S(1) / static_cast<unsigned long>(k.row_degree(r));
    for (std::size_t e = k.row_ptr[r]; e < k.row_ptr[r + 1]; ++e) m.at(r, k.col[e]) = share;
  }
  return m;
}

template <class S>
DenseMatrix<S> scan_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                           const BlockSchedule& schedule, std::size_t max_domain) {
  check_dense_cap(space.size(), max_domain);
  auto ks = schedule_kernels(sys, space, kernel, schedule);
  DenseMatrix<S> m = DenseMatrix<S>::identity(space.size());
  for (const RowUniformKernel& k : ks) kernels::apply_right(m, k);
  return m;
}

template <class S>
DenseMatrix<S> average_kernel_matrix(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                                     const BlockSchedule& schedule, std::size_t max_domain) {
  check_dense_cap(space.size(), max_domain);
  auto ks = schedule_kernels(sys, space, kernel, schedule);
  DenseMatrix<S> m(space.size(), space.size());
  const unsigned long blocks = ks.size();
  for (const RowUniformKernel& k : ks)
    for (std::size_t r = 0; r < space.size(); ++r) {
      const S share = S(1) / static_cast<unsigned long>(k.row_degree(r)) / blocks;
      for (std::size_t e = k.row_ptr[r]; e < k.row_ptr[r + 1]; ++e) m.at(r, k.col[e]) += share;
    }
  return m;
}

template <class S>
std::vector<S> invariance_residuals(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                                    const BlockSchedule& schedule) {
  Distribution<S> pi = stationary<S>(sys, space, kernel);
  std::vector<S> residuals;
  residuals.reserve(schedule.blocks.size());
  for (const Block& b : schedule.blocks) {
    RowUniformKernel k = block_kernel_matrix(sys, space, kernel, b);
    Distribution<S> out;
    out.tag = pi.tag;
    out.mass.assign(space.size(), S(0));
    for (std::size_t r = 0; r < space.size(); ++r) {
      if (pi.mass[r] == S(0)) continue;
      const S share = pi.mass[r] / static_cast<unsigned long>(k.row_degree(r));
      for (std::size_t e = k.row_ptr[r]; e < k.row_ptr[r + 1]; ++e) out.mass[k.col[e]] += share;
    }
    residuals.push_back(tv_distance(pi, out));
  }
  return residuals;
}

namespace {

inline bool plateau_equal(const Rational& a, const Rational& b) { return a == b; }
inline bool plateau_equal(double a, double b) { return scalar_abs(a - b) <= 1e-13; }

}  // namespace

template <class S>
MixResult<S> mixing_time(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                         const BlockSchedule& schedule, const MixOptions& opt) {
  check_dense_cap(space.size(), opt.max_domain);
  if (opt.eps <= 0 || opt.eps >= 1) fail(Errc::ParamOutOfRange, "eps must lie in (0,1)");
  auto ks = schedule_kernels(sys, space, kernel, schedule);
  Distribution<S> pi = stationary<S>(sys, space, kernel);
  DenseMatrix<S> m = DenseMatrix<S>::identity(space.size());

  MixResult<S> res;
  int flat = 0;
  for (long t = 1; t <= opt.max_scans; ++t) {
    for (const RowUniformKernel& k : ks) kernels::apply_right(m, k);
    S tv = kernels::max_row_tv(m, pi.mass);
    res.curve.push_back(tv);
    if (to_double(tv) <= opt.eps) {
      res.status = MixStatus::Mixed;
      res.mixing_time = t;
      return res;
    }
    if (opt.plateau_window > 0 && res.curve.size() >= 2 &&
        plateau_equal(res.curve[res.curve.size() - 2], tv)) {
      if (++flat >= opt.plateau_window) {
        res.status = MixStatus::NonErgodic;
        return res;
      }
    } else {
      flat = 0;
    }
  }
  res.status = MixStatus::HitScanLimit;
  return res;
}

FunctionalReport functional_deltas(const SpinSystem& sys, const StateSpace& space, const std::vector<double>& f) {
  if (f.size() != space.size()) fail(Errc::DomainMismatch, "functional/domain shape");
  const int n = space.n;
  std::vector<std::uint64_t> pow(n, 1);
  for (int j = n - 2; j >= 0; --j) pow[j] = pow[j + 1] * static_cast<std::uint64_t>(space.q);

  FunctionalReport rep;
  rep.site_deltas.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Group configurations by their off-i restriction; delta_i is the widest
    // f-range inside any group.
    std::unordered_map<std::uint64_t, std::pair<double, double>> range;
    range.reserve(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) {
      const std::uint64_t key =
          space.packed[p] - static_cast<std::uint64_t>(space.configs[p].spins[i]) * pow[i];
      auto [it, fresh] = range.try_emplace(key, std::pair<double, double>{f[p], f[p]});
      if (!fresh) {
        it->second.first = std::min(it->second.first, f[p]);
        it->second.second = std::max(it->second.second, f[p]);
      }
    }
    double best = 0;
    for (const auto& [key, mm] : range) best = std::max(best, mm.second - mm.first);
    rep.site_deltas[i] = best;
    rep.total += to_double(sys.weights[i]) * best;
  }
  return rep;
}

double contraction_ratio(const SpinSystem& sys, const StateSpace& space, const BlockKernel& kernel,
                         const BlockSchedule& schedule, const std::vector<double>& f) {
  FunctionalReport before = functional_deltas(sys, space, f);
  if (before.total == 0) fail(Errc::DegenerateFunctional, "functional has no one-site variation");
  auto ks = schedule_kernels(sys, space, kernel, schedule);
  std::vector<double> g = f;
  for (auto it = ks.rbegin(); it != ks.rend(); ++it) g = kernels::apply_vec(*it, g);
  FunctionalReport after = functional_deltas(sys, space, g);
  return after.total / before.total;
}

std::vector<std::pair<std::size_t, std::size_t>> discrepancy_pairs(const StateSpace& space, int i) {
  if (i < 0 || i >= space.n) fail(Errc::IndexOutOfRange, "site " + std::to_string(i));
  std::vector<std::uint64_t> pow(space.n, 1);
  for (int j = space.n - 2; j >= 0; --j) pow[j] = pow[j + 1] * static_cast<std::uint64_t>(space.q);
  std::map<std::uint64_t, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < space.size(); ++p) {
    const std::uint64_t key =
        space.packed[p] - static_cast<std::uint64_t>(space.configs[p].spins[i]) * pow[i];
    groups[key].push_back(p);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [key, members] : groups)
    for (std::size_t a : members)
      for (std::size_t b : members)
        if (a != b) pairs.emplace_back(a, b);
  return pairs;
}

#define SCANMIX_INSTANTIATE(S)                                                                              \
  template Distribution<S> stationary<S>(const SpinSystem&, const StateSpace&, const BlockKernel&);         \
  template S tv_distance<S>(const Distribution<S>&, const Distribution<S>&);                                \
  template DenseMatrix<S> block_matrix<S>(const SpinSystem&, const StateSpace&, const BlockKernel&,         \
                                          const Block&, std::size_t);                                       \
  template DenseMatrix<S> scan_matrix<S>(const SpinSystem&, const StateSpace&, const BlockKernel&,          \
                                         const BlockSchedule&, std::size_t);                                \
  template DenseMatrix<S> average_kernel_matrix<S>(const SpinSystem&, const StateSpace&, const BlockKernel&, \
                                                   const BlockSchedule&, std::size_t);                      \
  template std::vector<S> invariance_residuals<S>(const SpinSystem&, const StateSpace&, const BlockKernel&, \
                                                  const BlockSchedule&);                                    \
  template MixResult<S> mixing_time<S>(const SpinSystem&, const StateSpace&, const BlockKernel&,            \
                                       const BlockSchedule&, const MixOptions&);

SCANMIX_INSTANTIATE(double)
SCANMIX_INSTANTIATE(Rational)
#undef SCANMIX_INSTANTIATE

}  // namespace scanmix::exact
