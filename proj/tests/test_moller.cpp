#include <catch2/catch_amalgamated.hpp>

#include "slab/moller.hpp"

using namespace slab;

namespace {

const SpacetimeGrid kSmall(2, 6, {5}, 0.1, 0.125);
const SpacetimeGrid kWide(2, 6, {32}, 0.1, 0.125);

GaugePotential small_potential() {
  std::vector<double> a(std::size_t(kSmall.nsites() * 2), 0.0);
  a[std::size_t(kSmall.site(3, 2) * 2 + 0)] = 0.4;
  a[std::size_t(kSmall.site(2, 4) * 2 + 1)] = -0.2;
  return GaugePotential(kSmall, std::move(a), ConeCheck::allow_wraparound);
}

GaugePotential wide_potential() {
  return bump_potential(kWide, {0.8, 0.5}, 0.25, {2.0}, 0.1, 0.3);
}

double rel(const SpinorSection& a, const SpinorSection& b) {
  return rel_residual((a - b).norm(), a.norm(), b.norm());
}

}  // namespace

TEST_CASE("moller map intertwines the free and coupled operators", "[moller]") {
  const auto rep = build_rep(2);
  const MollerMap mm(rep, kSmall, 0.7, small_potential());
  Rng rng(211);
  for (int b = 0; b < 6; ++b) {
    const auto u = random_section(kSmall, rng);
    const auto lhs = mm.coupled_op.apply_D(moller_apply(mm, u));
    const auto rhs = entwine_i(mm.free_op.apply_D(u));
    CHECK(rel(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("moller deviation from entwining is retarded from the potential",
          "[moller]") {
  const auto rep = build_rep(2);
  const auto pot = wide_potential();
  const MollerMap mm(rep, kWide, 0.7, pot);
  Rng rng(223);
  const auto u = random_section(kWide, rng);
  const auto diff = moller_apply(mm, u) - entwine_i(u);
  CHECK(diff.norm() > 0.0);
  CHECK(diff.support().subset_of(causal_future(pot.supp)));
}

TEST_CASE("sections vanishing on the potential pass through untouched", "[moller]") {
  const auto rep = build_rep(2);
  const auto pot = wide_potential();
  const MollerMap mm(rep, kWide, 0.7, pot);
  Rng rng(227);
  const auto u =
      masked(random_section(kWide, rng), Region::box(kWide, 1, 1, {0}, kWide.nx));
  CHECK(moller_apply(mm, u).data == entwine_i(u).data);
}

TEST_CASE("moller round trips are exact inverses on both legs", "[moller]") {
  const auto rep = build_rep(2);
  const MollerMap mm(rep, kSmall, 0.7, small_potential());
  Rng rng(233);
  for (Leg leg : {Leg::spinor, Leg::cospinor}) {
    const auto u = random_section(kSmall, rng, Charge::uncharged, leg);
    const auto w = random_section(kSmall, rng, Charge::charged, leg);
    CHECK(rel(moller_inverse_apply(mm, moller_apply(mm, u)), u) < 1e-10);
    CHECK(rel(moller_apply(mm, moller_inverse_apply(mm, w)), w) < 1e-10);
    CHECK(rel(moller_adjoint_apply(mm, moller_adjoint_inverse_apply(mm, u)), u) < 1e-10);
    CHECK(rel(moller_adjoint_inverse_apply(mm, moller_adjoint_apply(mm, w)), w) < 1e-10);
  }
}

TEST_CASE("doubled moller maps act leg by leg", "[moller]") {
  const auto rep = build_rep(2);
  const MollerMap mm(rep, kSmall, 0.7, small_potential());
  Rng rng(239);
  const auto u = random_doubled(kSmall, rng);
  const auto ru = moller_apply(mm, u);
  CHECK(ru.sp.data == moller_apply(mm, u.sp).data);
  CHECK(ru.co.data == moller_apply(mm, u.co).data);
  const auto back = moller_inverse_apply(mm, ru);
  CHECK(rel_residual((back - u).norm(), back.norm(), u.norm()) < 1e-10);
}

TEST_CASE("the dual map is the adjoint under the global pairing", "[moller]") {
  const auto rep = build_rep(2);
  const MollerMap mm(rep, kSmall, 0.7, small_potential());
  Rng rng(241);
  for (int b = 0; b < 6; ++b) {
    const auto u = random_doubled(kSmall, rng);
    const auto v = random_doubled(kSmall, rng, Charge::charged);
    const cplx lhs = global_pairing(rep, moller_apply(mm, u), v);
    const cplx rhs = global_pairing(rep, u, moller_adjoint_apply(mm, v));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("the interaction kernel reproduces the moller deviation", "[moller]") {
  const auto rep = build_rep(2);
  const MollerMap mm(rep, kSmall, 0.7, small_potential());
  Rng rng(251);
  for (int b = 0; b < 4; ++b) {
    const auto u = random_section(kSmall, rng);
    const auto lhs = moller_apply(mm, u) - entwine_i(u);
    const auto rhs = moller_apply(mm, moller_interaction_apply(mm, entwine_i(u)));
    CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("moller maps reject wrongly tagged sections", "[moller]") {
  const auto rep = build_rep(2);
  const MollerMap mm(rep, kSmall, 0.7, small_potential());
  Rng rng(257);
  const auto u = random_section(kSmall, rng);
  const auto w = random_section(kSmall, rng, Charge::charged, Leg::spinor);
  CHECK_THROWS_AS(moller_apply(mm, w), BundleError);
  CHECK_THROWS_AS(moller_inverse_apply(mm, u), BundleError);
  CHECK_THROWS_AS(moller_adjoint_apply(mm, u), BundleError);
  CHECK_THROWS_AS(moller_adjoint_inverse_apply(mm, w), BundleError);
  CHECK_THROWS_AS(moller_interaction_apply(mm, u), BundleError);
  CHECK_THROWS_AS(
      moller_interaction_apply(mm, random_section(kSmall, rng, Charge::charged,
                                                  Leg::cospinor)),
      BundleError);
  CHECK_THROWS_AS(MollerMap(rep, kWide, 0.7, small_potential()), ShapeError);
}
