#include <catch2/catch_amalgamated.hpp>

#include "slab/grid.hpp"

using namespace slab;

namespace {

// brute force: (t', x') is causally after (t0, x0) iff t' >= t0 and the
// periodic offset is at most t' - t0 in every direction
Region brute_future_of_point(const SpacetimeGrid& g, int t0, long x0) {
  Region r(g);
  const auto c0 = g.xcoords(x0);
  for (int t = t0; t < g.nt; ++t)
    for (long xf = 0; xf < g.nspace(); ++xf) {
      const auto c = g.xcoords(xf);
      bool in = true;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (g.perdist(int(i), c[i], c0[i]) > t - t0) in = false;
      if (in) r.set(g.site(t, xf));
    }
  return r;
}

}  // namespace

TEST_CASE("grid constructor validates shape and cfl", "[grid]") {
  CHECK_NOTHROW(SpacetimeGrid(2, 8, {8}, 0.125, 0.125));
  CHECK_THROWS_AS(SpacetimeGrid(3, 8, {8, 8}, 0.1, 0.1), ConfigError);
  CHECK_THROWS_AS(SpacetimeGrid(2, 1, {8}, 0.1, 0.1), ConfigError);
  CHECK_THROWS_AS(SpacetimeGrid(2, 8, {8, 8}, 0.1, 0.1), ConfigError);
  CHECK_THROWS_AS(SpacetimeGrid(2, 8, {8}, 0.2, 0.1), ConfigError);
  CHECK_THROWS_AS(SpacetimeGrid(2, 8, {8}, -0.1, 0.1), ConfigError);
  const SpacetimeGrid g4(4, 4, {4, 6, 8}, 0.1, 0.25);
  CHECK(g4.fiber == 4);
  CHECK(g4.nspace() == 4 * 6 * 8);
  CHECK(g4.nvals() == 4 * g4.nsites());
  CHECK(g4.weight() == Catch::Approx(0.1 * 0.25 * 0.25 * 0.25));
}

TEST_CASE("flat index round trip", "[grid]") {
  const SpacetimeGrid g(4, 3, {4, 6, 8}, 0.1, 0.25);
  for (long xf = 0; xf < g.nspace(); ++xf) {
    const auto c = g.xcoords(xf);
    REQUIRE(g.xflat(c) == xf);
  }
  CHECK(g.perdist(0, 0, 3) == 1);
  CHECK(g.perdist(2, 1, 6) == 3);
}

TEST_CASE("region boxes, complement, subset", "[grid]") {
  const SpacetimeGrid g(2, 6, {8}, 0.1, 0.125);
  const Region box = Region::box(g, 2, 3, {1}, {4});
  CHECK(box.count() == 2 * 4);
  CHECK(box.at(g.site(2, 1)));
  CHECK_FALSE(box.at(g.site(1, 1)));
  CHECK(box.subset_of(Region::box(g, 0, 5, {0}, {7})));
  CHECK_FALSE(Region::box(g, 0, 5, {0}, {7}).subset_of(box));
  CHECK(box.complement().count() == g.nsites() - box.count());
  CHECK(box.complement().complement() == box);
  const auto [lo, hi] = box.time_extent();
  CHECK(lo == 2);
  CHECK(hi == 3);
  CHECK(Region(g).time_extent() == std::pair<int, int>{-1, -1});
}

TEST_CASE("causal future matches the periodic-offset rule", "[grid]") {
  const SpacetimeGrid g2(2, 7, {9}, 0.1, 0.2);
  for (const auto& [t0, x0] : std::vector<std::pair<int, long>>{{0, 0}, {2, 4}, {5, 8}}) {
    Region pt(g2);
    pt.set(g2.site(t0, x0));
    CHECK(causal_future(pt) == brute_future_of_point(g2, t0, x0));
  }
  const SpacetimeGrid g4(4, 5, {4, 3, 5}, 0.05, 0.2);
  Region pt(g4);
  pt.set(g4.site(1, g4.xflat({2, 1, 3})));
  CHECK(causal_future(pt) == brute_future_of_point(g4, 1, g4.xflat({2, 1, 3})));
}

TEST_CASE("causal future is idempotent and monotone in the seed", "[grid]") {
  const SpacetimeGrid g(2, 8, {10}, 0.1, 0.1);
  const Region seed = Region::box(g, 2, 3, {4}, {6});
  const Region fut = causal_future(seed);
  CHECK(causal_future(fut) == fut);
  CHECK(seed.subset_of(fut));
}

TEST_CASE("causal past is the time mirror of the future", "[grid]") {
  const SpacetimeGrid g(2, 7, {9}, 0.1, 0.2);
  Region pt(g);
  pt.set(g.site(4, 2));
  const Region past = causal_past(pt);
  Region mirrored(g);
  mirrored.set(g.site(g.nt - 1 - 4, 2));
  CHECK(past == time_mirror(causal_future(mirrored)));
  CHECK(past.at(g.site(1, 1)));
  CHECK_FALSE(past.at(g.site(5, 2)));
}

TEST_CASE("run length encoding covers exactly the mask", "[grid]") {
  const SpacetimeGrid g(2, 4, {5}, 0.1, 0.25);
  Region r(g);
  r.set(g.site(0, 1));
  r.set(g.site(0, 2));
  r.set(g.site(3, 4));
  const auto runs = region_rle(r);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == std::pair<long, long>{1, 2});
  CHECK(runs[1] == std::pair<long, long>{19, 1});
}
