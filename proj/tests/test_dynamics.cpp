#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "scanmix/chain.hpp"
#include "scanmix/errors.hpp"
#include "scanmix/exact.hpp"
#include "scanmix/kernel.hpp"
#include "test_util.hpp"

using namespace scanmix;

TEST_CASE("heat-bath support matches the brute-force completion filter") {
  struct Case {
    Graph g;
    int q;
    std::vector<int> block;
  };
  const Case cases[] = {
      {tutil::path_graph(4), 3, {1}},        {tutil::path_graph(4), 3, {1, 2}},
      {tutil::cycle_graph(4), 4, {0, 1}},    {tutil::paw_graph(), 4, {0, 1}},
      {tutil::paw_graph(), 4, {0, 1, 2}},    {tutil::complete_graph(4), 6, {2, 3}},
      {tutil::star_graph(3), 3, {0, 1, 2, 3}},
  };
  HeatBathKernel hb;
  for (const Case& tc : cases) {
    SpinSystem sys = make_system(tc.g, tc.q);
    StateSpace space = enumerate_configs(sys);
    BlockSchedule sched = make_schedule(tc.g, {tc.block});
    const Block& b = sched.blocks[0];
    for (const Configuration& x : space.configs) {
      UpdateSupport s = hb.support(sys, x, b);
      CHECK(s.outcomes == tutil::brute_support(sys, x, b));
      // Ascending packed order and off-block agreement.
      for (std::size_t t = 0; t < s.size(); ++t) {
        if (t > 0) CHECK(pack_index(s.outcomes[t - 1], sys.q) < pack_index(s.outcomes[t], sys.q));
        for (int j = 0; j < sys.n(); ++j)
          if (!b.contains(j)) CHECK(s.outcomes[t].spins[j] == x.spins[j]);
      }
    }
  }
}

TEST_CASE("heat-bath support can be empty only off the proper domain") {
  SpinSystem sys = make_system(tutil::path_graph(3), 2, /*restrict_to_proper=*/false);
  Configuration x;
  x.spins = {0, 0, 1};  // both neighbours of site 1 together block every spin
  HeatBathKernel hb;
  BlockSchedule sched = make_schedule(sys.graph, {{1}});
  CHECK_THROWS_AS(hb.support(sys, x, sched.blocks[0]), Error);

  // On the proper domain a block update always has its own spins available.
  SpinSystem restricted = make_system(tutil::path_graph(3), 2);
  StateSpace space = enumerate_configs(restricted);
  for (const Configuration& c : space.configs) CHECK(hb.support(restricted, c, sched.blocks[0]).size() >= 1);
}

TEST_CASE("shift kernel writes the old source spin forward") {
  SpinSystem sys = make_system(tutil::cycle_graph(4), 3, false);
  CopyShiftKernel ck(4);
  BlockSchedule sched = make_schedule(sys.graph, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});

  CHECK(ck.orient(sched.blocks[0]) == std::pair{0, 1});
  CHECK(ck.orient(sched.blocks[3]) == std::pair{3, 0});  // wraps around

  Configuration x;
  x.spins = {2, 0, 1, 0};
  UpdateSupport s = ck.support(sys, x, sched.blocks[0]);
  REQUIRE(s.size() == 3);
  for (std::size_t t = 0; t < s.size(); ++t) {
    CHECK(s.outcomes[t].spins[1] == 2);  // old spin of site 0
    CHECK(s.outcomes[t].spins[0] == static_cast<int>(t));
    CHECK(s.outcomes[t].spins[2] == 1);
    CHECK(s.outcomes[t].spins[3] == 0);
  }

  BlockSchedule bad = make_schedule(sys.graph, {{0, 2}});
  CHECK_THROWS_AS(ck.support(sys, x, bad.blocks[0]), Error);
  CHECK(!ck.stationary_on_proper());
}

TEST_CASE("block sampling is uniform over the support") {
  // 4-cycle, q=4, block {0,1}: with distinct boundary spins the support
  // has 7 outcomes. Chi-squared against uniform, 0.999 quantile of df 6.
  SpinSystem sys = make_system(tutil::cycle_graph(4), 4);
  BlockSchedule sched = make_schedule(sys.graph, {{0, 1}});
  const Block& b = sched.blocks[0];
  Configuration x;
  x.spins = {2, 3, 1, 0};
  HeatBathKernel hb;
  UpdateSupport s = hb.support(sys, x, b);
  REQUIRE(s.size() == 7);

  CounterRng rng(20260819);
  std::map<std::uint64_t, long> counts;
  const long draws = 7000;
  for (long t = 0; t < draws; ++t) counts[pack_index(hb.sample(sys, x, b, rng), sys.q)]++;
  REQUIRE(counts.size() == 7);
  const double expect = static_cast<double>(draws) / 7.0;
  double chi2 = 0;
  for (const auto& [idx, cnt] : counts) {
    const double d = static_cast<double>(cnt) - expect;
    chi2 += d * d / expect;
  }
  CHECK(chi2 < 22.458);
}

TEST_CASE("scan trajectories replay exactly and stay legal") {
  SpinSystem sys = make_system(tutil::cycle_graph(5), 4);
  BlockSchedule sched = tutil::edge_blocks(sys);
  HeatBathKernel hb;

  auto t1 = simulate(sys, sched, hb, start_chain(sys, 99), 40);
  auto t2 = simulate(sys, sched, hb, start_chain(sys, 99), 40);
  CHECK(t1 == t2);
  auto t3 = simulate(sys, sched, hb, start_chain(sys, 100), 40);
  CHECK(t1 != t3);

  for (const Configuration& c : t1) CHECK(sys.is_proper(c));

  // The sweep counter keys the substreams: continuing a run equals the
  // one-shot run of the same length.
  ChainState st = start_chain(sys, 99);
  auto first = simulate(sys, sched, hb, st, 15);
  ChainState mid = start_chain(sys, 99);
  for (int t = 0; t < 15; ++t) apply_scan(sys, sched, hb, mid);
  CHECK(mid.current == first.back());
  CHECK(mid.sweeps_done == 15);
}

TEST_CASE("start state validation") {
  SpinSystem sys = make_system(tutil::path_graph(3), 3);
  Configuration short_cfg;
  short_cfg.spins = {0, 1};
  CHECK_THROWS_AS(start_chain_at(sys, short_cfg, 1), Error);
  Configuration improper;
  improper.spins = {1, 1, 0};
  CHECK_THROWS_AS(start_chain_at(sys, improper, 1), Error);
  Configuration big;
  big.spins = {0, 3, 0};
  CHECK_THROWS_AS(start_chain_at(sys, big, 1), Error);
  Configuration ok;
  ok.spins = {0, 1, 0};
  CHECK(start_chain_at(sys, ok, 1).current == ok);
}

TEST_CASE("long-run site marginal matches the exact stationary law") {
  // Single-site sweeps on the 3-path with 4 spins; after a handful of
  // sweeps the chain is essentially stationary (exact mixing time is small).
  SpinSystem sys = make_system(tutil::path_graph(3), 4);
  StateSpace space = enumerate_configs(sys);
  BlockSchedule sched = tutil::site_blocks(sys);
  HeatBathKernel hb;

  std::vector<double> expect(4, 0.0);
  for (const Configuration& c : space.configs) expect[c.spins[0]] += 1.0;
  for (double& e : expect) e /= static_cast<double>(space.size());

  const long chains = 4000;
  std::vector<long> counts(4, 0);
  for (long seed = 0; seed < chains; ++seed) {
    ChainState st = start_chain(sys, 7000 + seed);
    for (int t = 0; t < 10; ++t) apply_scan(sys, sched, hb, st);
    counts[st.current.spins[0]]++;
  }
  double chi2 = 0;
  for (int c = 0; c < 4; ++c) {
    const double e = expect[c] * static_cast<double>(chains);
    const double d = static_cast<double>(counts[c]) - e;
    chi2 += d * d / e;
  }
  CHECK(chi2 < 16.266);  // 0.999 quantile, df 3
}
