#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <bit>

#include "slab/funcalg.hpp"

using namespace slab;

namespace {

struct Fixture {
  CliffordRep rep = build_rep(2);
  SpacetimeGrid grid{2, 6, {6}, 0.1, 0.125};
  double mass = 0.7;
  GaugePotential pot;
  TwoPointState omega;
  TwoPointState omega_g;
  ModeBasis basis;
};

Fixture make_fixture() {
  Fixture fx;
  fx.pot = box_potential(fx.grid, {0.4, -0.2}, 3, 4, {1}, {2}, ConeCheck::allow_wraparound);
  fx.omega = build_vacuum_state(fx.rep, fx.grid, fx.mass);
  const MollerMap mm(fx.rep, fx.grid, fx.mass, fx.pot);
  fx.omega_g = pullback_state(fx.omega, mm);
  const auto modes = site_delta_modes(fx.grid, {{2, 0}, {2, 2}, {2, 4}});
  fx.basis = build_mode_basis(fx.rep, fx.grid, fx.mass, fx.pot, modes, fx.omega,
                              fx.omega_g);
  return fx;
}

const Fixture& fx() {
  static const Fixture f = make_fixture();
  return f;
}

std::uint64_t random_mask(Rng& rng, int nmodes, int degree) {
  std::uint64_t m = 0;
  while (std::popcount(m) < degree) m |= std::uint64_t(1) << rng.below(std::uint64_t(nmodes));
  return m;
}

FermionicFunctional random_homogeneous(const ModeBasis& b, Charge q, int degree,
                                       Rng& rng) {
  FermionicFunctional f = zero_functional(b, q);
  if (degree == 0) {
    f.set_term(0, rng.cgauss());
    return f;
  }
  for (int k = 0; k < 3; ++k) f.add_term(random_mask(rng, b.nmodes, degree), rng.cgauss());
  return f;
}

std::vector<VecC> random_cols(Rng& rng, int nmodes, int count) {
  std::vector<VecC> cols;
  for (int k = 0; k < count; ++k) {
    VecC c(nmodes);
    for (int j = 0; j < nmodes; ++j) c(j) = rng.cgauss();
    cols.push_back(std::move(c));
  }
  return cols;
}

double scale_of(const FermionicFunctional& f) {
  return std::max(1.0, functional_max_abs(f));
}

}  // namespace

TEST_CASE("degree-three evaluation is the signed permutation sum", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(401);
  const auto f = monomial(b, Charge::uncharged, {0, 2, 5}, cplx(0.7, -0.4));
  const auto cols = random_cols(rng, b.nmodes, 3);
  const std::array<int, 3> rows = {0, 2, 5};
  cplx want(0.0, 0.0);
  const std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  for (int p = 0; p < 6; ++p) {
    const double sgn = p < 3 ? 1.0 : -1.0;
    cplx prod(1.0, 0.0);
    for (int r = 0; r < 3; ++r) prod *= cols[std::size_t(perms[std::size_t(p)][std::size_t(r)])](rows[std::size_t(r)]);
    want += sgn * prod;
  }
  want *= cplx(0.7, -0.4);
  const cplx got = evaluate(f, cols);
  CHECK(std::abs(got - want) < 1e-12 * std::max(1.0, std::abs(want)));
}

TEST_CASE("evaluation alternates exactly", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(403);
  const auto f = random_homogeneous(b, Charge::uncharged, 3, rng);
  auto cols = random_cols(rng, b.nmodes, 3);
  const cplx base = evaluate(f, cols);
  std::swap(cols[0], cols[2]);
  CHECK(evaluate(f, cols) == -base);
  cols[0] = cols[2];
  CHECK(evaluate(f, cols) == cplx(0.0, 0.0));
  CHECK_THROWS_AS(evaluate(f, random_cols(rng, b.nmodes + 1, 3)), ShapeError);
}

TEST_CASE("monomials normalize index order by parity", "[funcalg]") {
  const auto& b = fx().basis;
  const auto fwd = monomial(b, Charge::uncharged, {1, 3, 4}, cplx(1.0, 0.0));
  const auto swapped = monomial(b, Charge::uncharged, {3, 1, 4}, cplx(1.0, 0.0));
  CHECK(functional_distance(fwd, -swapped) == 0.0);
  const auto repeated = monomial(b, Charge::uncharged, {2, 2}, cplx(1.0, 0.0));
  CHECK(repeated.is_zero());
  CHECK_THROWS_AS(monomial(b, Charge::uncharged, {0, 99}, cplx(1.0, 0.0)), ConfigError);
}

TEST_CASE("wedge expands into shuffles", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(407);
  const auto f = random_homogeneous(b, Charge::uncharged, 2, rng);
  const auto g = random_homogeneous(b, Charge::uncharged, 1, rng);
  const auto cols = random_cols(rng, b.nmodes, 3);
  const cplx lhs = evaluate(wedge(f, g), cols);
  const auto fv = [&](int i, int j) { return evaluate(f, {cols[std::size_t(i)], cols[std::size_t(j)]}); };
  const auto gv = [&](int k) { return evaluate(g, {cols[std::size_t(k)]}); };
  const cplx rhs = fv(0, 1) * gv(2) - fv(0, 2) * gv(1) + fv(1, 2) * gv(0);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("wedge is graded commutative, associative, unital", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(409);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const auto f = random_homogeneous(b, Charge::uncharged, p, rng);
      const auto g = random_homogeneous(b, Charge::uncharged, q, rng);
      const double sgn = (p * q) % 2 == 0 ? 1.0 : -1.0;
      CHECK(functional_distance(wedge(f, g), cplx(sgn, 0.0) * wedge(g, f)) <
            1e-14 * scale_of(f) * scale_of(g));
    }
  const auto f = random_homogeneous(b, Charge::uncharged, 1, rng);
  const auto g = random_homogeneous(b, Charge::uncharged, 2, rng);
  const auto h = random_homogeneous(b, Charge::uncharged, 1, rng);
  const double sc = scale_of(f) * scale_of(g) * scale_of(h);
  CHECK(functional_distance(wedge(wedge(f, g), h), wedge(f, wedge(g, h))) < 1e-12 * sc);
  CHECK(functional_distance(wedge(unit_functional(b, Charge::uncharged), f), f) == 0.0);
}

TEST_CASE("left derivative prepends its direction", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(419);
  const auto f = random_homogeneous(b, Charge::uncharged, 3, rng);
  const auto cols = random_cols(rng, b.nmodes, 3);
  const auto df = derivative(f, cols[0]);
  const cplx lhs = evaluate(df, {cols[1], cols[2]});
  const cplx rhs = evaluate(f, cols);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  CHECK(df.degree() == 2);
}

TEST_CASE("truncation and index range are enforced", "[funcalg]") {
  const auto& b = fx().basis;
  auto f = zero_functional(b, Charge::uncharged);
  CHECK_THROWS_AS(f.set_term(std::uint64_t(1) << b.nmodes, cplx(1.0, 0.0)), ConfigError);
  FermionicFunctional g = zero_functional(b, Charge::uncharged);
  g.p_max = 2;
  CHECK_THROWS_AS(g.set_term(0b111, cplx(1.0, 0.0)), TruncationError);
  g.set_term(0b11, cplx(1.0, 0.0));
  FermionicFunctional h = g;
  h.terms.clear();
  h.set_term(0b100, cplx(1.0, 0.0));
  CHECK_THROWS_AS(wedge(g, h), TruncationError);
  const auto other = zero_functional(b, Charge::charged);
  CHECK_THROWS_AS(f += other, BundleError);
}

TEST_CASE("peierls bracket of basis modes is the contracted causal kernel",
          "[funcalg]") {
  const auto& b = fx().basis;
  const MatC stilde = b.gram_inv * b.s_free * b.gram_inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto br = peierls(monomial(b, Charge::uncharged, {i}, cplx(1.0, 0.0)),
                              monomial(b, Charge::uncharged, {j}, cplx(1.0, 0.0)), b);
      CHECK(std::abs(br.term(0) - stilde(i, j)) < 1e-14 * std::max(1.0, std::abs(stilde(i, j))));
      CHECK(br.degree() == 0);
    }
}

TEST_CASE("peierls bracket is graded anticommutative and Leibniz", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(421);
  for (int p = 1; p <= 2; ++p)
    for (int q = 1; q <= 2; ++q) {
      const auto f = random_homogeneous(b, Charge::uncharged, p, rng);
      const auto g = random_homogeneous(b, Charge::uncharged, q, rng);
      const double sgn = (p * q) % 2 == 0 ? -1.0 : 1.0;
      const auto lhs = peierls(g, f, b);
      const auto rhs = cplx(sgn, 0.0) * peierls(f, g, b);
      CHECK(functional_distance(lhs, rhs) < 1e-12 * std::max(1.0, functional_max_abs(lhs)));
    }
  for (int p = 1; p <= 2; ++p)
    for (int q = 1; q <= 2; ++q) {
      const auto f = random_homogeneous(b, Charge::uncharged, p, rng);
      const auto g = random_homogeneous(b, Charge::uncharged, q, rng);
      const auto h = random_homogeneous(b, Charge::uncharged, 1, rng);
      const double sgn = (p * q) % 2 == 0 ? 1.0 : -1.0;
      const auto lhs = peierls(f, wedge(g, h), b);
      const auto rhs = wedge(peierls(f, g, b), h) + cplx(sgn, 0.0) * wedge(g, peierls(f, h, b));
      CHECK(functional_distance(lhs, rhs) < 1e-12 * std::max(1.0, functional_max_abs(lhs)));
    }
}

TEST_CASE("graded jacobi identity holds in the shifted grading", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(431);
  for (const auto& [p, q, r] : std::vector<std::array<int, 3>>{
           {1, 1, 1}, {1, 2, 1}, {2, 1, 2}, {2, 2, 2}, {1, 2, 3}}) {
    const auto f = random_homogeneous(b, Charge::uncharged, p, rng);
    const auto g = random_homogeneous(b, Charge::uncharged, q, rng);
    const auto h = random_homogeneous(b, Charge::uncharged, r, rng);
    const auto sgn = [](int a, int c) {
      return ((a - 1) * (c - 1)) % 2 == 0 ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
    };
    auto jac = sgn(p, r) * peierls(f, peierls(g, h, b), b);
    jac += sgn(q, p) * peierls(g, peierls(h, f, b), b);
    jac += sgn(r, q) * peierls(h, peierls(f, g, b), b);
    const double sc = std::max({1.0, functional_max_abs(peierls(f, peierls(g, h, b), b))});
    CHECK(functional_max_abs(jac) < 1e-12 * sc);
  }
}

TEST_CASE("canonical anticommutation closes the degree-one star", "[funcalg]") {
  const auto& b = fx().basis;
  const auto& omega = fx().omega;
  const MatC anti = cplx(0.0, 1.0) * (b.gram_inv * b.s_free * b.gram_inv);
  const double scale = std::max(1.0, anti.cwiseAbs().maxCoeff());
  for (int i = 0; i < b.nmodes; ++i)
    for (int j = 0; j < b.nmodes; ++j) {
      const auto f = monomial(b, Charge::uncharged, {i}, cplx(1.0, 0.0));
      const auto g = monomial(b, Charge::uncharged, {j}, cplx(1.0, 0.0));
      const auto sum = series_add(star(f, g, b, omega), star(g, f, b, omega));
      CHECK(functional_max_abs(sum.at(0)) == 0.0);
      CHECK(std::abs(sum.at(1).term(0) - anti(i, j)) < 1e-12 * scale);
      CHECK(sum.max_order() <= 1);
    }
}

TEST_CASE("star product is associative order by order", "[funcalg]") {
  const auto& b = fx().basis;
  const auto& omega = fx().omega;
  Rng rng(439);
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = random_homogeneous(b, Charge::uncharged, 1 + int(rng.below(2)), rng);
    const auto g = random_homogeneous(b, Charge::uncharged, 1 + int(rng.below(2)), rng);
    const auto h = random_homogeneous(b, Charge::uncharged, 1 + int(rng.below(2)), rng);
    const auto lhs = star(star(f, g, b, omega), promote(h), b, omega);
    const auto rhs = star(promote(f), star(g, h, b, omega), b, omega);
    const double sc = std::max({1.0, functional_max_abs(f), functional_max_abs(g),
                                functional_max_abs(h)});
    CHECK(series_distance(lhs, rhs) < 1e-12 * sc * sc * sc);
  }
}

TEST_CASE("star order zero is the wedge and the state picks the insertion",
          "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(443);
  const auto f = random_homogeneous(b, Charge::uncharged, 2, rng);
  const auto g = random_homogeneous(b, Charge::uncharged, 2, rng);
  const auto s = star(f, g, b, fx().omega);
  CHECK(functional_distance(s.at(0), wedge(f, g)) == 0.0);
  const auto fq = random_homogeneous(b, Charge::charged, 1, rng);
  const auto gq = random_homogeneous(b, Charge::charged, 1, rng);
  CHECK_THROWS_AS(star(fq, gq, b, fx().omega), BundleError);
  CHECK_NOTHROW(star(fq, gq, b, fx().omega_g));
}

TEST_CASE("involution squares to one and antihomomorphs the wedge", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(449);
  for (int p = 0; p <= 3; ++p) {
    const auto f = random_homogeneous(b, Charge::uncharged, p, rng);
    CHECK(functional_distance(functional_involution(functional_involution(f, b), b), f) ==
          0.0);
  }
  const auto f = random_homogeneous(b, Charge::uncharged, 2, rng);
  const auto g = random_homogeneous(b, Charge::uncharged, 1, rng);
  CHECK(functional_distance(functional_involution(wedge(f, g), b),
                            wedge(functional_involution(g, b), functional_involution(f, b))) <
        1e-14 * scale_of(f) * scale_of(g));
}

TEST_CASE("minor pullback realizes precomposition with a linear map", "[funcalg]") {
  Rng rng(457);
  FermionicFunctional f;
  f.charge = Charge::charged;
  f.basis_id = 7;
  f.nmodes = 4;
  f.p_max = 4;
  f.terms[0b0011] = cplx(1.0, 2.0);
  f.terms[0b1010] = cplx(-0.5, 0.0);
  f.terms[0b0110] = cplx(0.0, 0.3);
  MatC r(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = rng.cgauss();
  const auto pulled = slab::detail::minor_pullback(f, r, 4, Charge::uncharged);
  CHECK(pulled.charge == Charge::uncharged);
  for (int trial = 0; trial < 4; ++trial) {
    const auto cols = random_cols(rng, 4, 2);
    std::vector<VecC> mapped;
    for (const auto& c : cols) mapped.push_back(VecC(r * c));
    const cplx lhs = evaluate(pulled, cols);
    const cplx rhs = evaluate(f, mapped);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("algebra moller maps are mutually inverse and respect evaluation",
          "[funcalg]") {
  const auto& b = fx().basis;
  const MollerMap mm(fx().rep, fx().grid, fx().mass, fx().pot);
  Rng rng(461);
  const auto f = random_homogeneous(b, Charge::charged, 2, rng);
  const auto pushed = algebra_moller(f, b);
  CHECK(pushed.charge == Charge::uncharged);
  const auto back = algebra_moller_inverse(pushed, b);
  CHECK(functional_distance(back, f) < 1e-10 * scale_of(f));

  DoubledSection u1(fx().grid), u2(fx().grid);
  for (int j = 0; j < b.nmodes; ++j) {
    const cplx z1 = rng.cgauss(), z2 = rng.cgauss();
    const auto& m = b.modes[std::size_t(j)];
    for (std::size_t k = 0; k < u1.sp.data.size(); ++k) {
      u1.sp.data[k] += z1 * m.sp.data[k];
      u1.co.data[k] += z1 * m.co.data[k];
      u2.sp.data[k] += z2 * m.sp.data[k];
      u2.co.data[k] += z2 * m.co.data[k];
    }
  }
  const cplx lhs = evaluate(pushed, {u1, u2}, b);
  const cplx rhs = evaluate(f, {moller_apply(mm, u1), moller_apply(mm, u2)}, b);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  CHECK_THROWS_AS(algebra_moller(pushed, b), BundleError);
  CHECK_THROWS_AS(algebra_moller_inverse(f, b), BundleError);
}

TEST_CASE("moller map is a star homomorphism onto the free algebra", "[funcalg]") {
  const auto& b = fx().basis;
  Rng rng(463);
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = random_homogeneous(b, Charge::charged, 1 + int(rng.below(2)), rng);
    const auto g = random_homogeneous(b, Charge::charged, 1 + int(rng.below(2)), rng);
    const auto coupled = star(f, g, b, fx().omega_g);
    const auto free_side =
        star(algebra_moller(f, b), algebra_moller(g, b), b, fx().omega);
    HbarSeries pushed;
    for (const auto& o : coupled.orders) pushed.orders.push_back(algebra_moller(o, b));
    CHECK(series_distance(pushed, free_side) <
          1e-10 * std::max(1.0, functional_max_abs(f) * functional_max_abs(g)));
  }
}

TEST_CASE("with no coupling the algebra moller maps are retags", "[funcalg]") {
  const auto& f0 = fx();
  std::vector<double> zero(std::size_t(f0.grid.nsites() * 2), 0.0);
  const GaugePotential pot(f0.grid, std::move(zero));
  const auto basis = build_mode_basis_vacuum(f0.rep, f0.grid, f0.mass, pot,
                                             site_delta_modes(f0.grid, {{2, 0}, {2, 2}}));
  CHECK(basis.moller_trivial);
  Rng rng(467);
  const auto f = random_homogeneous(basis, Charge::charged, 2, rng);
  const auto pushed = algebra_moller(f, basis);
  CHECK(pushed.terms == f.terms);
  CHECK(pushed.charge == Charge::uncharged);
  const auto back = algebra_moller_inverse(pushed, basis);
  CHECK(back.terms == f.terms);
}

TEST_CASE("mode basis construction rejects ill-posed families", "[funcalg]") {
  const auto& f0 = fx();
  CHECK_THROWS_AS(build_mode_basis(f0.rep, f0.grid, f0.mass, f0.pot, {}, f0.omega,
                                   f0.omega_g),
                  ConfigError);
  CHECK_THROWS_AS(build_mode_basis(f0.rep, f0.grid, f0.mass, f0.pot,
                                   site_delta_modes(f0.grid, {{2, 0}}), f0.omega,
                                   f0.omega_g, 5),
                  ConfigError);
  CHECK_THROWS_AS(site_delta_modes(f0.grid, {{0, 2}}), ConfigError);
  CHECK_THROWS_AS(site_delta_modes(f0.grid, {{2, 99}}), ConfigError);
  CHECK_THROWS_AS(build_mode_basis(f0.rep, f0.grid, f0.mass, f0.pot,
                                   site_delta_modes(f0.grid, {{2, 0}}, Charge::charged),
                                   f0.omega, f0.omega_g),
                  BundleError);
  CHECK_THROWS_AS(build_mode_basis(f0.rep, f0.grid, f0.mass, f0.pot,
                                   site_delta_modes(f0.grid, {{2, 0}}), f0.omega_g,
                                   f0.omega),
                  BundleError);
  const auto omega2 = build_vacuum_state(f0.rep, f0.grid, f0.mass);
  const MollerMap mm(f0.rep, f0.grid, f0.mass, f0.pot);
  const auto stray = pullback_state(omega2, mm);
  CHECK_THROWS_AS(build_mode_basis(f0.rep, f0.grid, f0.mass, f0.pot,
                                   site_delta_modes(f0.grid, {{2, 0}}), f0.omega, stray),
                  ConfigError);
}

TEST_CASE("moller images outside the span are a hard error", "[funcalg]") {
  const auto& f0 = fx();
  std::vector<double> a(std::size_t(f0.grid.nsites() * 2), 0.0);
  a[std::size_t(f0.grid.site(2, 2) * 2 + 0)] = 0.4;
  const GaugePotential early(f0.grid, std::move(a), ConeCheck::allow_wraparound);
  CHECK_THROWS_AS(build_mode_basis_vacuum(f0.rep, f0.grid, f0.mass, early,
                                          site_delta_modes(f0.grid, {{3, 2}})),
                  NumericError);
}

TEST_CASE("mode coordinates reproduce span members", "[funcalg]") {
  const auto& b = fx().basis;
  const VecC c0 = b.coordinates(b.modes[0]);
  VecC e0 = VecC::Zero(b.nmodes);
  e0(0) = 1.0;
  CHECK((c0 - e0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b.reconstruction_residual(b.modes[0], c0) < 1e-12);
  Rng rng(479);
  const auto offspan = random_doubled(fx().grid, rng);
  const VecC c = b.coordinates(offspan);
  CHECK(b.reconstruction_residual(offspan, c) > 0.1);
  CHECK(b.self_conjugate);
}

TEST_CASE("functional serialization round trips through json", "[funcalg]") {
  const auto& b = fx().basis;
  const auto f = monomial(b, Charge::uncharged, {0, 2}, cplx(0.5, -0.25));
  const nlohmann::json j = functional_to_json(f);
  CHECK(j.at("schema_version").get<std::string>() == kSchemaVersion);
  CHECK(j.at("bundle").get<std::string>() == "uncharged");
  CHECK(j.at("nmodes").get<int>() == b.nmodes);
  CHECK(j.at("terms").size() == 1);
  CHECK(j.at("terms")[0].at("index") == nlohmann::json::array({0, 2}));
  CHECK(j.at("terms")[0].at("re").get<double>() == 0.5);
  const auto back = functional_from_json(j, b);
  CHECK(functional_distance(back, f) == 0.0);

  nlohmann::json bad = j;
  bad["terms"][0]["index"] = {2, 0};
  CHECK_THROWS_AS(functional_from_json(bad, b), ConfigError);
  nlohmann::json wrong = j;
  wrong["nmodes"] = b.nmodes + 1;
  CHECK_THROWS_AS(functional_from_json(wrong, b), ConfigError);

  Rng rng(487);
  const auto sf = random_homogeneous(b, Charge::uncharged, 1, rng);
  const auto sg = random_homogeneous(b, Charge::uncharged, 1, rng);
  const auto series = star(sf, sg, b, fx().omega);
  const auto series_back = series_from_json(series_to_json(series), b);
  CHECK(series_distance(series_back, series) == 0.0);
}

TEST_CASE("bump modes vanish outside their windows", "[funcalg]") {
  const auto& f0 = fx();
  const auto m = bump_mode(f0.grid, 0, 2.5, 1.4, {3.0}, {2.0});
  CHECK(m.sp.at(2, 3, 0) != cplx(0.0, 0.0));
  CHECK(m.sp.at(2, 3, 1) == cplx(0.0, 0.0));
  CHECK(m.norm() > 0.0);
  int t_lo = f0.grid.nt, t_hi = -1;
  for (int t = 0; t < f0.grid.nt; ++t)
    for (long x = 0; x < f0.grid.nspace(); ++x)
      if (m.sp.at(t, x, 0) != cplx(0.0, 0.0)) {
        t_lo = std::min(t_lo, t);
        t_hi = std::max(t_hi, t);
      }
  CHECK(t_lo >= 2);
  CHECK(t_hi <= 3);
  CHECK_THROWS_AS(bump_mode(f0.grid, 5, 2.5, 1.0, {3.0}, {2.0}), ConfigError);
  CHECK_THROWS_AS(bump_mode(f0.grid, 0, 2.5, 1.0, {3.0, 4.0}, {2.0}), ShapeError);
}

TEST_CASE("series bookkeeping pads with tagged zeros", "[funcalg]") {
  const auto& b = fx().basis;
  const auto f = monomial(b, Charge::uncharged, {1}, cplx(2.0, 0.0));
  const auto s = promote(f);
  CHECK(s.max_order() == 0);
  const auto padded = s.at(3);
  CHECK(padded.is_zero());
  CHECK(padded.basis_id == b.id);
  CHECK(series_distance(series_add(s, s), promote(cplx(2.0, 0.0) * f)) == 0.0);
  CHECK_THROWS_AS(HbarSeries{}.at(0), ConfigError);
}
