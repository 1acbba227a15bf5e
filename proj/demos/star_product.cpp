// Builds a six-mode fermionic algebra over a small slab, deforms the wedge
// product with the vacuum two-point state, and prints the canonical
// anticommutators that the star product generates. The second half pushes a
// charged observable through the algebra-level Moller map and back.

#include <cstdio>
#include <string>

#include "slab/funcalg.hpp"

using namespace slab;

namespace {

std::string mask_name(std::uint64_t mask) {
  std::string s = "{";
  for (int i = 0; i < 64; ++i)
    if (mask >> i & 1) s += (s.size() > 1 ? "," : "") + std::to_string(i);
  return s + "}";
}

void print_terms(const char* label, const FermionicFunctional& f) {
  std::printf("%s:", label);
  if (f.terms.empty()) std::printf(" (zero)");
  for (const auto& [mask, coef] : f.terms)
    std::printf("  %s (%+.4f%+.4fi)", mask_name(mask).c_str(), coef.real(), coef.imag());
  std::printf("\n");
}

cplx scalar_part(const FermionicFunctional& f) {
  const auto it = f.terms.find(0);
  return it == f.terms.end() ? cplx(0.0, 0.0) : it->second;
}

}  // namespace

int main() {
  const CliffordRep rep = build_rep(2);
  const SpacetimeGrid g(2, 12, {10}, 0.1, 0.1);
  const double mass = 0.7;
  const GaugePotential pot =
      box_potential(g, {0.4, -0.2}, 6, 7, {3}, {6}, ConeCheck::allow_wraparound);

  const auto modes = site_delta_modes(g, {{2, 1}, {2, 4}, {2, 7}});
  const TwoPointState omega = build_vacuum_state(rep, g, mass);
  const MollerMap mm(rep, g, mass, pot);
  const TwoPointState omega_g = pullback_state(omega, mm);
  const ModeBasis basis = build_mode_basis(rep, g, mass, pot, modes, omega, omega_g);

  std::printf("mode family: %d delta modes on row 2, self-conjugate: %s\n",
              basis.nmodes, basis.self_conjugate ? "yes" : "no");
  std::printf("potential on rows [6, 7]; moller trivial on the family: %s\n\n",
              basis.moller_trivial ? "yes" : "no");

  const MatC anti_expected =
      cplx(0.0, 1.0) * (basis.gram_inv * basis.s_free * basis.gram_inv);
  std::printf("star anticommutators against the causal pairing:\n");
  std::printf("%8s  %24s  %24s\n", "pair", "order-1 scalar", "expected");
  for (const auto& [i, j] : {std::pair{0, 1}, {0, 2}, {2, 3}}) {
    const auto ei = monomial(basis, Charge::uncharged, {i}, cplx(1.0, 0.0));
    const auto ej = monomial(basis, Charge::uncharged, {j}, cplx(1.0, 0.0));
    const HbarSeries sum =
        series_add(star(ei, ej, basis, omega), star(ej, ei, basis, omega));
    const cplx got = scalar_part(sum.at(1));
    const cplx want = anti_expected(i, j);
    std::printf("  {%d,%d}  %+.6f%+.6fi  %+.6f%+.6fi\n", i, j, got.real(), got.imag(),
                want.real(), want.imag());
  }

  const auto f = monomial(basis, Charge::uncharged, {0}, cplx(1.0, 0.0));
  const auto h = monomial(basis, Charge::uncharged, {1, 2}, cplx(0.0, 1.0));
  const HbarSeries fh = star(f, h, basis, omega);
  std::printf("\nstar product of a degree-1 and a degree-2 monomial:\n");
  for (int n = 0; n < int(fh.orders.size()); ++n)
    print_terms(("  order " + std::to_string(n)).c_str(), fh.at(n));

  FermionicFunctional obs = monomial(basis, Charge::charged, {0, 1}, cplx(1.0, 0.0));
  obs.add_term(1ull << 2, cplx(0.0, 0.5));
  const FermionicFunctional pushed = algebra_moller(obs, basis);
  const FermionicFunctional back = algebra_moller_inverse(pushed, basis);
  double round_trip = 0.0;
  for (const auto& [mask, coef] : obs.terms) {
    const auto it = back.terms.find(mask);
    const cplx got = it == back.terms.end() ? cplx(0.0, 0.0) : it->second;
    round_trip = std::max(round_trip, std::abs(got - coef));
  }
  std::printf("\n");
  print_terms("charged observable", obs);
  print_terms("pushed through the interacting algebra", pushed);
  std::printf("moller round trip max term error: %.2e\n", round_trip);
  return 0;
}
