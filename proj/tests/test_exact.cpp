#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scanmix/chain.hpp"
#include "scanmix/errors.hpp"
#include "scanmix/exact.hpp"
#include "scanmix/kernel.hpp"
#include "scanmix/ring.hpp"
#include "test_util.hpp"

using namespace scanmix;

namespace {

// Independent dense sweep matrix: per-block transition rows rebuilt from the
// brute-force completion filter, multiplied with a naive triple loop.
DenseMatrix<Rational> brute_scan_matrix(const SpinSystem& sys, const StateSpace& space,
                                        const BlockSchedule& sched) {
  const std::size_t d = space.size();
  DenseMatrix<Rational> m = DenseMatrix<Rational>::identity(d);
  for (const Block& b : sched.blocks) {
    DenseMatrix<Rational> k(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      auto outs = tutil::brute_support(sys, space.configs[r], b);
      const Rational share = Rational(1) / static_cast<unsigned long>(outs.size());
      for (const Configuration& o : outs) k.at(r, space.position(pack_index(o, sys.q))) += share;
    }
    DenseMatrix<Rational> next(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t t = 0; t < d; ++t) {
        if (m.at(r, t) == Rational(0)) continue;
        for (std::size_t c = 0; c < d; ++c) next.at(r, c) += m.at(r, t) * k.at(t, c);
      }
    m = next;
  }
  return m;
}

}  // namespace

TEST_CASE("stationary law is uniform over the enumerated domain") {
  HeatBathKernel hb;
  SpinSystem sys = make_system(tutil::cycle_graph(4), 3);
  StateSpace space = enumerate_configs(sys);
  auto pi = exact::stationary<Rational>(sys, space, hb);
  CHECK(pi.tag == exact::tag_of(space));
  Rational sum(0);
  for (const Rational& p : pi.mass) {
    CHECK(p == Rational(1) / static_cast<unsigned long>(space.size()));
    sum += p;
  }
  CHECK(sum == Rational(1));

  CopyShiftKernel ck(4);
  SpinSystem free_sys = make_system(tutil::cycle_graph(4), 2, false);
  StateSpace free_space = enumerate_configs(free_sys);
  auto mu = exact::stationary<Rational>(free_sys, free_space, ck);
  CHECK(mu.mass.size() == 16);
  for (const Rational& p : mu.mass) CHECK(p == Rational(1, 16));
}

TEST_CASE("tv distance refuses mismatched domains and computes known values") {
  SpinSystem a = make_system(tutil::path_graph(3), 3);
  SpinSystem b = make_system(tutil::path_graph(3), 4);
  StateSpace sa = enumerate_configs(a), sb = enumerate_configs(b);
  HeatBathKernel hb;
  auto pa = exact::stationary<Rational>(a, sa, hb);
  auto pb = exact::stationary<Rational>(b, sb, hb);
  CHECK_THROWS_AS(exact::tv_distance(pa, pb), Error);

  exact::Distribution<Rational> p1{exact::tag_of(sa), std::vector<Rational>(sa.size(), Rational(0))};
  exact::Distribution<Rational> p2 = p1;
  p1.mass[0] = Rational(1);
  p2.mass[1] = Rational(1);
  CHECK(exact::tv_distance(p1, p1) == Rational(0));
  CHECK(exact::tv_distance(p1, p2) == Rational(1));
  p2.mass[1] = Rational(1, 2);
  p2.mass[0] = Rational(1, 2);
  CHECK(exact::tv_distance(p1, p2) == Rational(1, 2));
}

TEST_CASE("sweep and block matrices are row stochastic") {
  SpinSystem sys = make_system(tutil::paw_graph(), 4);
  StateSpace space = enumerate_configs(sys);
  HeatBathKernel hb;
  BlockSchedule sched = tutil::edge_blocks(sys);

  auto sweep = exact::scan_matrix<Rational>(sys, space, hb, sched);
  REQUIRE(sweep.rows == space.size());
  for (std::size_t r = 0; r < sweep.rows; ++r) {
    Rational sum(0);
    for (std::size_t c = 0; c < sweep.cols; ++c) {
      sum += sweep.at(r, c);
      CHECK(sgn(sweep.at(r, c)) >= 0);
    }
    CHECK(sum == Rational(1));
  }

  auto one = exact::block_matrix<Rational>(sys, space, hb, sched.blocks[0]);
  for (std::size_t r = 0; r < one.rows; ++r) {
    Rational sum(0);
    for (std::size_t c = 0; c < one.cols; ++c) sum += one.at(r, c);
    CHECK(sum == Rational(1));
  }

  auto avg = exact::average_kernel_matrix<Rational>(sys, space, hb, sched);
  for (std::size_t r = 0; r < avg.rows; ++r) {
    Rational sum(0);
    for (std::size_t c = 0; c < avg.cols; ++c) sum += avg.at(r, c);
    CHECK(sum == Rational(1));
  }

  CHECK_THROWS_AS(exact::scan_matrix<Rational>(sys, space, hb, sched, /*max_domain=*/8), Error);
}

TEST_CASE("one whole-graph block update lands exactly on the stationary law") {
  SpinSystem sys = make_system(tutil::path_graph(2), 3);
  StateSpace space = enumerate_configs(sys);
  REQUIRE(space.size() == 6);
  HeatBathKernel hb;
  BlockSchedule sched = make_schedule(sys.graph, {{0, 1}});

  auto sweep = exact::scan_matrix<Rational>(sys, space, hb, sched);
  for (std::size_t r = 0; r < sweep.rows; ++r)
    for (std::size_t c = 0; c < sweep.cols; ++c) CHECK(sweep.at(r, c) == Rational(1, 6));

  exact::MixOptions opt;
  opt.eps = 0.5;
  auto res = exact::mixing_time<Rational>(sys, space, hb, sched, opt);
  CHECK(res.status == exact::MixStatus::Mixed);
  CHECK(res.mixing_time == 1);
  CHECK(res.curve.front() == Rational(0));
}

TEST_CASE("mixing curve matches an independently built sweep matrix") {
  SpinSystem sys = make_system(tutil::path_graph(3), 4);
  StateSpace space = enumerate_configs(sys);
  HeatBathKernel hb;
  BlockSchedule sched = tutil::site_blocks(sys);

  exact::MixOptions opt;
  opt.eps = 0.01;
  auto res = exact::mixing_time<Rational>(sys, space, hb, sched, opt);
  REQUIRE(res.status == exact::MixStatus::Mixed);
  CHECK(res.mixing_time == 4);
  REQUIRE(res.curve.size() >= 4);
  CHECK(res.curve[0] == Rational(5, 12));

  auto pi = exact::stationary<Rational>(sys, space, hb);
  DenseMatrix<Rational> power = DenseMatrix<Rational>::identity(space.size());
  DenseMatrix<Rational> sweep = brute_scan_matrix(sys, space, sched);
  for (std::size_t t = 0; t < res.curve.size(); ++t) {
    DenseMatrix<Rational> next(power.rows, power.cols);
    for (std::size_t r = 0; r < power.rows; ++r)
      for (std::size_t m = 0; m < power.cols; ++m) {
        if (power.at(r, m) == Rational(0)) continue;
        for (std::size_t c = 0; c < power.cols; ++c) next.at(r, c) += power.at(r, m) * sweep.at(m, c);
      }
    power = next;
    CHECK(kernels::max_row_tv_serial(power, pi.mass) == res.curve[t]);
  }

  for (std::size_t t = 1; t < res.curve.size(); ++t) CHECK(res.curve[t] <= res.curve[t - 1]);
}

TEST_CASE("float backend tracks the exact curve") {
  SpinSystem sys = make_system(tutil::cycle_graph(4), 3);
  StateSpace space = enumerate_configs(sys);
  HeatBathKernel hb;
  BlockSchedule sched = tutil::edge_blocks(sys);

  exact::MixOptions opt;
  opt.eps = 0.01;
  auto ex = exact::mixing_time<Rational>(sys, space, hb, sched, opt);
  auto fl = exact::mixing_time<double>(sys, space, hb, sched, opt);
  REQUIRE(ex.status == exact::MixStatus::Mixed);
  CHECK(fl.status == exact::MixStatus::Mixed);
  CHECK(fl.mixing_time == ex.mixing_time);
  REQUIRE(fl.curve.size() == ex.curve.size());
  for (std::size_t t = 0; t < ex.curve.size(); ++t)
    CHECK(std::abs(fl.curve[t] - to_double(ex.curve[t])) <= 1e-12);
}

TEST_CASE("a frozen dynamics plateaus instead of mixing") {
  ring::RingSystem ring = ring::make_ring(3, 2);
  StateSpace space = enumerate_configs(ring.sys);
  exact::MixOptions opt;
  opt.eps = 0.01;
  opt.max_scans = 200;
  auto res = exact::mixing_time<Rational>(ring.sys, space, ring.kernel, ring.schedule, opt);
  CHECK(res.status == exact::MixStatus::NonErgodic);
  CHECK(res.mixing_time == -1);
  for (const Rational& v : res.curve) CHECK(v == Rational(1, 2));

  // With the plateau check disabled the scan budget is the only stop.
  opt.plateau_window = 0;
  opt.max_scans = 30;
  auto res2 = exact::mixing_time<Rational>(ring.sys, space, ring.kernel, ring.schedule, opt);
  CHECK(res2.status == exact::MixStatus::HitScanLimit);
  CHECK(res2.curve.size() == 30);
}

TEST_CASE("parallel kernel paths match the serial reference bit for bit") {
  SpinSystem sys = make_system(tutil::cycle_graph(6), 4);
  StateSpace space = enumerate_configs(sys);
  REQUIRE(space.size() == 732);
  HeatBathKernel hb;
  BlockSchedule sched = tutil::edge_blocks(sys);
  auto ks = exact::schedule_kernels(sys, space, hb, sched);
  REQUIRE(ks.size() == sched.blocks.size());

  DenseMatrix<double> mp = DenseMatrix<double>::identity(space.size());
  DenseMatrix<double> ms = DenseMatrix<double>::identity(space.size());
  for (int sweep = 0; sweep < 3; ++sweep)
    for (const RowUniformKernel& k : ks) {
      kernels::apply_right(mp, k);
      kernels::apply_right_serial(ms, k);
    }
  CHECK(mp.a == ms.a);

  CounterRng rng(42);
  std::vector<double> f(space.size());
  for (double& v : f) v = tutil::uniform01(rng);
  for (const RowUniformKernel& k : ks) {
    CHECK(kernels::apply_vec(k, f) == kernels::apply_vec_serial(k, f));
    f = kernels::apply_vec(k, f);
  }

  std::vector<double> pi(space.size(), 1.0 / static_cast<double>(space.size()));
  CHECK(kernels::max_row_tv(mp, pi) == kernels::max_row_tv_serial(ms, pi));
}

TEST_CASE("stationarity residuals vanish exactly") {
  HeatBathKernel hb;
  for (Graph g : {tutil::paw_graph(), tutil::cycle_graph(5)}) {
    SpinSystem sys = make_system(std::move(g), 4);
    StateSpace space = enumerate_configs(sys);
    BlockSchedule sched = tutil::edge_blocks(sys);
    for (const Rational& r : exact::invariance_residuals<Rational>(sys, space, hb, sched))
      CHECK(r == Rational(0));
  }

  ring::RingSystem ring = ring::make_ring(4, 3);
  StateSpace space = enumerate_configs(ring.sys);
  for (const Rational& r :
       exact::invariance_residuals<Rational>(ring.sys, space, ring.kernel, ring.schedule))
    CHECK(r == Rational(0));
}

TEST_CASE("functional deltas and sweep contraction") {
  SpinSystem sys = make_system(tutil::path_graph(2), 3);
  StateSpace space = enumerate_configs(sys);
  // Configs in packed order: 01 02 10 12 20 21. f = [site 0 spin == 0].
  std::vector<double> f = {1, 1, 0, 0, 0, 0};
  auto rep = exact::functional_deltas(sys, space, f);
  REQUIRE(rep.site_deltas.size() == 2);
  CHECK(rep.site_deltas[0] == 1.0);
  CHECK(rep.site_deltas[1] == 0.0);
  CHECK(rep.total == 1.0);

  // One whole-graph update makes every functional constant.
  HeatBathKernel hb;
  BlockSchedule whole = make_schedule(sys.graph, {{0, 1}});
  CHECK(exact::contraction_ratio(sys, space, hb, whole, f) == 0.0);

  std::vector<double> constant(space.size(), 3.5);
  CHECK_THROWS_AS(exact::contraction_ratio(sys, space, hb, whole, constant), Error);
  CHECK_THROWS_AS(exact::functional_deltas(sys, space, {1.0, 2.0}), Error);

  // Doubling the weight of site 0 doubles its share of the total.
  set_weights(sys, {Rational(2), Rational(1)});
  CHECK(exact::functional_deltas(sys, space, f).total == 2.0);
}

TEST_CASE("discrepancy pairs differ at exactly the requested site") {
  SpinSystem sys = make_system(tutil::path_graph(3), 3);
  StateSpace space = enumerate_configs(sys);
  for (int i = 0; i < 3; ++i) {
    auto pairs = exact::discrepancy_pairs(space, i);
    std::size_t brute = 0;
    for (std::size_t a = 0; a < space.size(); ++a)
      for (std::size_t b = 0; b < space.size(); ++b) {
        if (a == b) continue;
        int diffs = 0;
        for (int j = 0; j < 3; ++j)
          if (space.configs[a].spins[j] != space.configs[b].spins[j]) ++diffs;
        if (diffs == 1 && space.configs[a].spins[i] != space.configs[b].spins[i]) ++brute;
      }
    CHECK(pairs.size() == brute);
    for (auto [a, b] : pairs) {
      CHECK(a != b);
      for (int j = 0; j < 3; ++j) {
        if (j == i)
          CHECK(space.configs[a].spins[j] != space.configs[b].spins[j]);
        else
          CHECK(space.configs[a].spins[j] == space.configs[b].spins[j]);
      }
    }
  }
}
