// Times the OpenMP kernel-application paths against their serial references
// on a real domain and checks that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "scanmix/exact.hpp"
#include "scanmix/rng.hpp"
#include "scanmix/spin_system.hpp"

using namespace scanmix;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double uniform01(CounterRng& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

}  // namespace

int main(int argc, char** argv) {
  int n = 6, q = 4;
  long reps = 20;
  for (int a = 1; a + 1 < argc; a += 2) {
    const std::string key = argv[a];
    const long val = std::stol(argv[a + 1]);
    if (key == "--n") n = static_cast<int>(val);
    else if (key == "-q" || key == "--spins") q = static_cast<int>(val);
    else if (key == "--reps") reps = val;
    else {
      std::fprintf(stderr, "usage: bench_kernels [--n N] [-q Q] [--reps R]\n");
      return 2;
    }
  }

  std::vector<std::pair<int, int>> edges;
  for (int s = 0; s < n; ++s) edges.emplace_back(s, (s + 1) % n);
  SpinSystem sys = make_system(build_graph(n, edges), q);
  StateSpace space = enumerate_configs(sys);
  std::vector<std::vector<int>> site_lists;
  for (int s = 0; s < n; ++s) site_lists.push_back({s});
  BlockSchedule schedule = make_schedule(sys.graph, site_lists);
  HeatBathKernel kernel;
  auto ks = exact::schedule_kernels(sys, space, kernel, schedule);
  const std::size_t N = space.size();
  std::printf("cycle n=%d q=%d: domain %zu, %d blocks, %ld sweeps\n", n, q, N, schedule.size(), reps);

  bool all_match = true;
  auto report = [&](const char* name, double ts, double tp, bool match) {
    std::printf("%-12s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical %s\n", name, ts, tp,
                tp > 0 ? ts / tp : 0.0, match ? "yes" : "NO");
    all_match = all_match && match;
  };

  {
    DenseMatrix<double> ms = DenseMatrix<double>::identity(N);
    auto t0 = std::chrono::steady_clock::now();
    for (long r = 0; r < reps; ++r)
      for (const auto& k : ks) kernels::apply_right_serial(ms, k);
    const double ts = seconds_since(t0);

    DenseMatrix<double> mp = DenseMatrix<double>::identity(N);
    t0 = std::chrono::steady_clock::now();
    for (long r = 0; r < reps; ++r)
      for (const auto& k : ks) kernels::apply_right(mp, k);
    const double tp = seconds_since(t0);
    report("apply_right", ts, tp, ms.a == mp.a);

    std::vector<double> pi(N, 1.0 / static_cast<double>(N));
    t0 = std::chrono::steady_clock::now();
    double vs = 0;
    for (long r = 0; r < reps; ++r) vs = kernels::max_row_tv_serial(ms, pi);
    const double tvs = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    double vp = 0;
    for (long r = 0; r < reps; ++r) vp = kernels::max_row_tv(mp, pi);
    const double tvp = seconds_since(t0);
    report("max_row_tv", tvs, tvp, vs == vp);
  }

  {
    CounterRng rng(7);
    std::vector<double> f(N);
    for (auto& v : f) v = uniform01(rng);
    std::vector<double> gs = f, gp = f;
    auto t0 = std::chrono::steady_clock::now();
    for (long r = 0; r < reps; ++r)
      for (const auto& k : ks) gs = kernels::apply_vec_serial(k, gs);
    const double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (long r = 0; r < reps; ++r)
      for (const auto& k : ks) gp = kernels::apply_vec(k, gp);
    const double tp = seconds_since(t0);
    report("apply_vec", ts, tp, gs == gp);
  }

  if (!all_match) {
    std::fprintf(stderr, "parallel results deviate from the serial reference\n");
    return 1;
  }
  return 0;
}
