#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "slab/fields.hpp"

using namespace slab;

namespace {

const SpacetimeGrid kGrid(2, 5, {6}, 0.1, 0.125);

}  // namespace

TEST_CASE("random sections are reproducible from the seed", "[fields]") {
  Rng a(42), b(42), c(43);
  const auto sa = random_section(kGrid, a);
  const auto sb = random_section(kGrid, b);
  const auto sc = random_section(kGrid, c);
  CHECK(sa.data == sb.data);
  CHECK(sa.data != sc.data);
  CHECK(sa.norm() > 0.0);
}

TEST_CASE("masking, support, and zero_on agree", "[fields]") {
  Rng rng(7);
  const auto s = random_section(kGrid, rng);
  const Region box = Region::box(kGrid, 1, 3, {2}, {4});
  const auto sm = masked(s, box);
  CHECK(sm.support().subset_of(box));
  CHECK(sm.zero_on(box.complement()));
  CHECK_FALSE(s.support().subset_of(box));
  for (int t = 1; t <= 3; ++t)
    for (long x = 2; x <= 4; ++x)
      for (int c = 0; c < kGrid.fiber; ++c) CHECK(sm.at(t, x, c) == s.at(t, x, c));
}

TEST_CASE("bilinear pairing of point sections reduces to the spinor metric",
          "[fields]") {
  const auto rep = build_rep(2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      SpinorSection s(kGrid, Charge::uncharged, Leg::spinor);
      SpinorSection c(kGrid, Charge::uncharged, Leg::cospinor);
      s.at(2, 3, a) = cplx(1.0, 0.0);
      c.at(2, 3, b) = cplx(1.0, 0.0);
      const cplx want = kGrid.weight() * rep.h(a, b);
      CHECK(std::abs(pairing(rep, s, c) - want) < 1e-15);
    }
}

TEST_CASE("pairing rejects mismatched bundles", "[fields]") {
  const auto rep = build_rep(2);
  const SpinorSection s(kGrid, Charge::uncharged, Leg::spinor);
  const SpinorSection c(kGrid, Charge::uncharged, Leg::cospinor);
  const SpinorSection cq(kGrid, Charge::charged, Leg::cospinor);
  CHECK_THROWS_AS(pairing(rep, s, s), BundleError);
  CHECK_THROWS_AS(pairing(rep, c, s), BundleError);
  CHECK_THROWS_AS(pairing(rep, s, cq), BundleError);
  const SpacetimeGrid other(2, 5, {8}, 0.1, 0.125);
  CHECK_THROWS_AS(pairing(rep, SpinorSection(other), c), ShapeError);
}

TEST_CASE("section arithmetic enforces matching bundles", "[fields]") {
  SpinorSection s(kGrid, Charge::uncharged, Leg::spinor);
  const SpinorSection c(kGrid, Charge::uncharged, Leg::cospinor);
  const SpinorSection q(kGrid, Charge::charged, Leg::spinor);
  CHECK_THROWS_AS(s += c, BundleError);
  CHECK_THROWS_AS(s -= q, BundleError);
  CHECK_THROWS_AS(s += SpinorSection(SpacetimeGrid(2, 6, {6}, 0.1, 0.125)), ShapeError);
}

TEST_CASE("hermitian pairing is conjugate symmetric for a hermitian metric",
          "[fields]") {
  const auto rep = build_rep(2);
  Rng rng(11);
  const auto s = random_section(kGrid, rng);
  const auto w = random_section(kGrid, rng);
  const cplx sw = hermitian_pairing(rep, s, w);
  const cplx ws = hermitian_pairing(rep, w, s);
  CHECK(std::abs(sw - std::conj(ws)) < 1e-12 * std::abs(sw));
}

TEST_CASE("global pairing is symmetric and splits into leg pairings", "[fields]") {
  const auto rep = build_rep(2);
  Rng rng(3);
  const auto u = random_doubled(kGrid, rng);
  const auto v = random_doubled(kGrid, rng);
  const cplx uv = global_pairing(rep, u, v);
  CHECK(std::abs(uv - global_pairing(rep, v, u)) < 1e-12 * std::abs(uv));
  const cplx split = pairing(rep, v.sp, u.co) + pairing(rep, u.sp, v.co);
  CHECK(std::abs(uv - split) < 1e-12 * std::abs(uv));
}

TEST_CASE("involution swaps legs with conjugation and squares to one", "[fields]") {
  Rng rng(5);
  const auto u = random_doubled(kGrid, rng);
  const auto iu = involution(u);
  CHECK(iu.sp.data[7] == std::conj(u.co.data[7]));
  const auto uu = involution(iu);
  CHECK(uu.sp.data == u.sp.data);
  CHECK(uu.co.data == u.co.data);
}

TEST_CASE("integrate applies the cell weight", "[fields]") {
  std::vector<cplx> density(std::size_t(kGrid.nsites()), cplx(2.0, -1.0));
  const cplx got = integrate(kGrid, density);
  const cplx want = cplx(2.0, -1.0) * double(kGrid.nsites()) * kGrid.weight();
  CHECK(std::abs(got - want) < 1e-13);
  density.pop_back();
  CHECK_THROWS_AS(integrate(kGrid, density), ShapeError);
}

TEST_CASE("binary serialization round trips bitwise", "[fields]") {
  Rng rng(99);
  const auto s = random_section(kGrid, rng, Charge::charged, Leg::cospinor);
  const auto path =
      (std::filesystem::temp_directory_path() / "slab_fields_roundtrip.bin").string();
  save_binary(s, path);
  const auto r = load_binary(path);
  CHECK(r.grid.same_shape(s.grid));
  CHECK(r.charge == s.charge);
  CHECK(r.leg == s.leg);
  CHECK(r.data == s.data);
  std::filesystem::remove(path);
}

TEST_CASE("csv dump has one row per site plus a header", "[fields]") {
  Rng rng(1);
  const auto s = random_section(kGrid, rng);
  const auto path =
      (std::filesystem::temp_directory_path() / "slab_fields_dump.csv").string();
  save_csv(s, path);
  std::ifstream f(path);
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line == "t,x0,re0,im0,re1,im1");
  long rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == kGrid.nsites());
  std::filesystem::remove(path);
}
