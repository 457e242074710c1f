#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tuple>

#include "scanmix/errors.hpp"
#include "scanmix/ring.hpp"
#include "test_util.hpp"

using namespace scanmix;

TEST_CASE("ring construction wires overlapping shift blocks around the cycle") {
  ring::RingSystem rs = ring::make_ring(5, 3);
  CHECK(rs.sys.n() == 5);
  CHECK(rs.sys.q == 3);
  CHECK(!rs.sys.restrict_to_proper);
  REQUIRE(rs.schedule.blocks.size() == 5);
  for (int k = 0; k < 5; ++k) {
    const Block& b = rs.schedule.blocks[k];
    REQUIRE(b.size() == 2);
    auto [src, dst] = rs.kernel.orient(b);
    CHECK(src == k);
    CHECK(dst == (k + 1) % 5);
  }
  CHECK_THROWS_AS(ring::make_ring(2, 3), Error);
  CHECK_THROWS_AS(ring::make_ring(5, 1), Error);
}

TEST_CASE("shift influence entries are certain along the cycle") {
  for (int n : {3, 4, 6})
    for (int q : {2, 3}) {
      auto ri = ring::ring_influence(n, q);
      CHECK(ri.alpha == Rational(1));
      CHECK(ri.alpha_weitz == Rational(1, 2));
      REQUIRE(static_cast<int>(ri.nonzero.size()) == n);
      for (int k = 0; k < n; ++k) {
        auto [bk, i, j, val] = ri.nonzero[k];
        CHECK(bk == k);
        CHECK(i == k);
        CHECK(j == (k + 1) % n);
        CHECK(val == Rational(1));
      }
    }
}

TEST_CASE("the scan freezes site zero while the averaged chain mixes") {
  for (std::uint64_t seed : {1ull, 7ull, 1234ull}) {
    auto rep = ring::demonstrate_nonmixing(3, 2, 1000, seed, 30);
    CHECK(rep.site_zero_constant);
    CHECK(rep.tv_floor == Rational(1, 2));
    CHECK(rep.floor_holds);
    REQUIRE(rep.scan_tv.size() == 30);
    for (const Rational& tv : rep.scan_tv) CHECK(tv == Rational(1, 2));
    REQUIRE(rep.mixture_tv.size() == 30);
    for (std::size_t t = 1; t < rep.mixture_tv.size(); ++t) CHECK(rep.mixture_tv[t] < rep.mixture_tv[t - 1]);
    CHECK(rep.mixture_tv.back() < Rational(1, 4));
    CHECK(rep.mixture_tv.back() > Rational(0));
  }
}

TEST_CASE("larger rings and more spins keep the floor") {
  auto rep = ring::demonstrate_nonmixing(4, 3, 400, 99, 12);
  CHECK(rep.site_zero_constant);
  CHECK(rep.tv_floor == Rational(2, 3));
  CHECK(rep.floor_holds);
  for (const Rational& tv : rep.scan_tv) CHECK(tv >= Rational(2, 3));

  // Horizon zero skips the exact part entirely.
  auto quick = ring::demonstrate_nonmixing(5, 4, 50, 3, 0);
  CHECK(quick.site_zero_constant);
  CHECK(quick.scan_tv.empty());
  CHECK(quick.mixture_tv.empty());
}
