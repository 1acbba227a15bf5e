#pragma once

// Identity batteries. Each check returns a VerifyItem: identifier, battery
// size, seed, worst residual, tolerance, verdict. Batteries draw random
// sections from a seeded generator so reruns are bit-reproducible; dense
// checks materialize both routes of an operator identity on a reduced grid
// and compare whole matrices. Cone enforcement is deliberately off inside
// algebraic-identity batteries (the discrete identities hold on the periodic
// slab with or without wraparound); support and cone discipline get their
// own exact mask checks on localized sources.

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "slab/clifford.hpp"
#include "slab/config.hpp"
#include "slab/fields.hpp"
#include "slab/funcalg.hpp"
#include "slab/gauge.hpp"
#include "slab/green.hpp"
#include "slab/grid.hpp"
#include "slab/hadamard.hpp"
#include "slab/moller.hpp"
#include "slab/report.hpp"
#include "slab/tolerances.hpp"

namespace slab {

struct SuiteResult {
  std::vector<VerifyItem> items;
  json extras = json::object();
};

namespace detail {

inline VerifyItem make_item(const std::string& id, int battery, std::uint64_t seed,
                            double res, double tolerance) {
  VerifyItem it;
  it.id = id;
  it.battery = battery;
  it.seed = seed;
  it.max_residual = res;
  it.tolerance = tolerance;
  it.pass = res <= tolerance;
  return it;
}

inline VerifyItem report_only_item(const std::string& id, int battery, std::uint64_t seed,
                                   double value, const std::string& note) {
  VerifyItem it;
  it.id = id;
  it.battery = battery;
  it.seed = seed;
  it.max_residual = value;
  it.tolerance = 0.0;
  it.pass = true;
  it.blocking = false;
  it.note = note;
  return it;
}

inline std::uint64_t item_seed(const RunConfig& cfg, const std::string& id) {
  return cfg.seed ^ fnv1a64(id);
}

inline Region interior_region(const SpacetimeGrid& g) {
  std::vector<int> lo(std::size_t(g.dim - 1), 0), hi;
  for (int n : g.nx) hi.push_back(n - 1);
  return Region::box(g, 1, g.nt - 2, lo, hi);
}

inline SpinorSection interior_random(const SpacetimeGrid& g, Rng& rng, Charge q, Leg l) {
  return masked(random_section(g, rng, q, l), interior_region(g));
}

inline DoubledSection interior_random_doubled(const SpacetimeGrid& g, Rng& rng, Charge q) {
  const Region r = interior_region(g);
  DoubledSection u = random_doubled(g, rng, q);
  u.sp = masked(u.sp, r);
  u.co = masked(u.co, r);
  return u;
}

inline DoubledSection mask_doubled(const DoubledSection& u, const Region& r) {
  return DoubledSection(masked(u.sp, r), masked(u.co, r));
}

inline DoubledSection entag(const DoubledSection& u) {
  return DoubledSection(entwine_i(u.sp), entwine_i(u.co));
}

inline DoubledSection detag(const DoubledSection& u) {
  return DoubledSection(entwine_p(u.sp), entwine_p(u.co));
}

inline double doubled_rel(const DoubledSection& a, const DoubledSection& b) {
  return rel_residual((a - b).norm(), a.norm(), b.norm());
}

// product K * S for S with sparse columns, skipping zero entries of S
inline MatC sparse_col_product(const MatC& K, const MatC& S) {
  MatC out = MatC::Zero(K.rows(), S.cols());
  for (long j = 0; j < S.cols(); ++j)
    for (long i = 0; i < S.rows(); ++i)
      if (S(i, j) != cplx(0.0, 0.0)) out.col(j) += S(i, j) * K.col(i);
  return out;
}

// zero the input columns of a doubled-index dense map for boundary rows
inline void restrict_interior_columns(MatC& m, const SpacetimeGrid& g) {
  const long half = g.nvals();
  const long row_len = g.nspace() * g.fiber;
  for (long j = 0; j < m.cols(); ++j) {
    const long v = j < half ? j : j - half;
    const long t = v / row_len;
    if (t == 0 || t == g.nt - 1) m.col(j).setZero();
  }
}

// dense matrix of the global pairing applied from the left: (P m), with
// P = weight * [[0, H], [H, 0]] and H the sitewise spinor metric
inline MatC pairing_times(const CliffordRep& rep, const SpacetimeGrid& g, const MatC& m) {
  const long half = g.nvals();
  const int f = g.fiber;
  MatC out(m.rows(), m.cols());
  for (long j = 0; j < m.cols(); ++j) {
    for (long site = 0; site < g.nsites(); ++site) {
      out.col(j).segment(site * f, f) = rep.h * m.col(j).segment(half + site * f, f);
      out.col(j).segment(half + site * f, f) = rep.h * m.col(j).segment(site * f, f);
    }
  }
  return out * g.weight();
}

}  // namespace detail

// --------------------------------------------------------------- clifford

inline VerifyItem check_clifford_relations(const std::vector<CliffordRep>& reps) {
  double worst = 0.0;
  for (const CliffordRep& rep : reps) {
    const int f = rep.gamma[0].rows();
    for (int a = 0; a < rep.dim; ++a)
      for (int b = 0; b < rep.dim; ++b) {
        const MatC anti = rep.gamma[std::size_t(a)] * rep.gamma[std::size_t(b)] +
                          rep.gamma[std::size_t(b)] * rep.gamma[std::size_t(a)];
        const MatC want = (a == b ? 2.0 * rep.eta[std::size_t(a)] : 0.0) *
                          MatC::Identity(f, f);
        worst = std::max(worst, (anti - want).cwiseAbs().maxCoeff());
      }
  }
  return detail::make_item("clifford.anticommutators", int(reps.size()), 0, worst,
                           tol::matrix);
}

inline VerifyItem check_clifford_hermiticity(const std::vector<CliffordRep>& reps) {
  double worst = 0.0;
  for (const CliffordRep& rep : reps) {
    worst = std::max(worst, (rep.h - rep.h.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (rep.h * rep.h_inv - MatC::Identity(rep.h.rows(), rep.h.cols()))
                                .cwiseAbs()
                                .maxCoeff());
    for (int a = 0; a < rep.dim; ++a) {
      const MatC& ga = rep.gamma[std::size_t(a)];
      worst = std::max(worst, (ga.adjoint() * rep.h - rep.h * ga).cwiseAbs().maxCoeff());
    }
  }
  return detail::make_item("clifford.h_hermiticity", int(reps.size()), 0, worst,
                           tol::matrix);
}

// ------------------------------------------------------------------ green

// Two-sided Green identities for one operator, spinor and doubled routes.
inline VerifyItem check_green_identities(const std::string& id, const DiracOp& op,
                                         Charge q, int battery, std::uint64_t seed,
                                         double tolerance) {
  const SpacetimeGrid& g = op.grid;
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const SpinorSection f = detail::interior_random(g, rng, q, Leg::spinor);
    worst = std::max(worst, rel_residual(op.apply_D(op.retarded(f, ConeCheck::off)).data,
                                         f.data));
    worst = std::max(worst, rel_residual(op.apply_D(op.advanced(f, ConeCheck::off)).data,
                                         f.data));
    worst = std::max(worst, rel_residual(op.retarded(op.apply_D(f), ConeCheck::off).data,
                                         f.data));
    worst = std::max(worst, rel_residual(op.advanced(op.apply_D(f), ConeCheck::off).data,
                                         f.data));
    const DoubledSection u = detail::interior_random_doubled(g, rng, q);
    worst = std::max(worst,
                     detail::doubled_rel(
                         op.apply_D_doubled(op.retarded_doubled(u, ConeCheck::off)), u));
    worst = std::max(worst,
                     detail::doubled_rel(
                         op.advanced_doubled(op.apply_D_doubled(u), ConeCheck::off), u));
  }
  return detail::make_item(id, battery, seed, worst, tolerance);
}

// Exact support masks of the retarded and advanced solves on point sources.
inline VerifyItem check_green_retardation(const std::string& id, const DiracOp& op,
                                          Charge q, int battery, std::uint64_t seed) {
  const SpacetimeGrid& g = op.grid;
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    SpinorSection f(g, q, Leg::spinor);
    const int c = int(rng.below(std::uint64_t(g.fiber)));
    const long xf = long(rng.below(std::uint64_t(g.nspace())));
    // upper-half rows keep the forward cone inside the torus, lower-half
    // rows the backward one; the masks themselves are checked exactly
    const int t_ret = g.nt / 2 + int(rng.below(std::uint64_t(g.nt / 2 - 1)));
    f.at(t_ret, xf, c) = cplx(1.0, 0.0);
    const Region supp = f.support();
    const SpinorSection ret = op.retarded(f);
    if (!ret.zero_on(causal_future(supp).complement())) worst = 1.0;
    f.at(t_ret, xf, c) = cplx(0.0, 0.0);
    const int t_adv = 1 + int(rng.below(std::uint64_t(g.nt / 2 - 1)));
    f.at(t_adv, xf, c) = cplx(1.0, 0.0);
    const SpinorSection adv = op.advanced(f);
    if (!adv.zero_on(causal_past(f.support()).complement())) worst = 1.0;
  }
  return detail::make_item(id, battery, seed, worst, 0.0);
}

// Massless two-dimensional slab at unit cfl: the retarded solution of a
// point source is carried rigidly along the two lattice characteristics.
// The expected section is rebuilt here from the one-step projectors alone.
inline VerifyItem check_green_characteristics(std::uint64_t seed) {
  const CliffordRep rep = build_rep(2);
  const int n = 48;
  const SpacetimeGrid g(2, n, {n}, 1.0 / n, 1.0 / n);
  const DiracOp op(rep, g, 0.0);
  const MatC alpha = velocity_matrix(rep, 0);
  const MatC idm = MatC::Identity(2, 2);
  const MatC pp = 0.5 * (idm + alpha);
  const MatC pm = 0.5 * (idm - alpha);
  const MatC gm = cplx(0.0, -g.dt * rep.eta[0]) * rep.gamma[0];
  Rng rng(seed);
  double worst = 0.0;
  for (int c = 0; c < 2; ++c) {
    const int t0 = 1 + int(rng.below(8));
    const long x0 = long(rng.below(std::uint64_t(n)));
    SpinorSection f(g, Charge::uncharged, Leg::spinor);
    f.at(t0, x0, c) = cplx(1.0, 0.0);
    const SpinorSection got = op.retarded(f, ConeCheck::off);
    SpinorSection want(g, Charge::uncharged, Leg::spinor);
    const VecC w = gm.col(c);
    const VecC wp = pp * w, wm = pm * w;
    for (int j = 0; t0 + 1 + j < g.nt; ++j) {
      const long xr = (x0 + j) % n;
      const long xl = ((x0 - j) % n + n) % n;
      for (int k = 0; k < 2; ++k) {
        want.at(t0 + 1 + j, xr, k) += wp(k);
        want.at(t0 + 1 + j, xl, k) += wm(k);
      }
    }
    worst = std::max(worst, rel_residual(got.data, want.data));
  }
  return detail::make_item("green.characteristics", 2, seed, worst, tol::composed);
}

// ----------------------------------------------------------------- moller

// D_A (R u) = iota (D u) on both legs of the doubled bundle.
inline VerifyItem check_moller_intertwining(const MollerMap& mm, int battery,
                                            std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const DoubledSection u = random_doubled(mm.grid, rng, Charge::uncharged);
    const DoubledSection lhs = mm.coupled_op.apply_D_doubled(moller_apply(mm, u));
    const DoubledSection rhs = detail::entag(mm.free_op.apply_D_doubled(u));
    worst = std::max(worst, detail::doubled_rel(lhs, rhs));
  }
  return detail::make_item("moller.intertwining", battery, seed, worst, tolerance);
}

// R - iota is supported in the causal future of the coupling support, exactly.
inline VerifyItem check_moller_retardation(const MollerMap& mm, int battery,
                                           std::uint64_t seed) {
  Rng rng(seed);
  const Region allowed = causal_future(mm.pot.supp);
  const Region away = allowed.complement();
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const DoubledSection u = random_doubled(mm.grid, rng, Charge::uncharged);
    const DoubledSection diff = moller_apply(mm, u) - detail::entag(u);
    if (!diff.sp.zero_on(away) || !diff.co.zero_on(away)) worst = 1.0;
  }
  return detail::make_item("moller.retardation", battery, seed, worst, 0.0);
}

// Two-sided inverses for both the map and its adjoint.
inline VerifyItem check_moller_inverse(const MollerMap& mm, int battery,
                                       std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const DoubledSection u = random_doubled(mm.grid, rng, Charge::uncharged);
    const DoubledSection v = random_doubled(mm.grid, rng, Charge::charged);
    worst = std::max(worst,
                     detail::doubled_rel(moller_inverse_apply(mm, moller_apply(mm, u)), u));
    worst = std::max(worst,
                     detail::doubled_rel(moller_apply(mm, moller_inverse_apply(mm, v)), v));
    worst = std::max(
        worst,
        detail::doubled_rel(moller_adjoint_inverse_apply(mm, moller_adjoint_apply(mm, v)),
                            v));
    worst = std::max(
        worst,
        detail::doubled_rel(moller_adjoint_apply(mm, moller_adjoint_inverse_apply(mm, u)),
                            u));
  }
  return detail::make_item("moller.inverse", battery, seed, worst, tolerance);
}

// R - iota = R o iota with o the one-step interaction kernel.
inline VerifyItem check_moller_interaction(const MollerMap& mm, int battery,
                                           std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const SpinorSection u = random_section(mm.grid, rng, Charge::uncharged, Leg::spinor);
    const SpinorSection lhs = moller_apply(mm, u) - entwine_i(u);
    const SpinorSection rhs =
        moller_apply(mm, moller_interaction_apply(mm, entwine_i(u)));
    worst = std::max(worst, rel_residual(lhs.data, rhs.data));
  }
  return detail::make_item("moller.interaction", battery, seed, worst, tolerance);
}

// <R u, v> = <u, R* v> under the global pairing.
inline VerifyItem check_moller_adjoint(const MollerMap& mm, int battery,
                                       std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const DoubledSection u = random_doubled(mm.grid, rng, Charge::uncharged);
    const DoubledSection v = random_doubled(mm.grid, rng, Charge::charged);
    const cplx lhs = global_pairing(mm.rep, moller_apply(mm, u), v);
    const cplx rhs = global_pairing(mm.rep, u, moller_adjoint_apply(mm, v));
    worst = std::max(worst, rel_residual(lhs, rhs));
  }
  return detail::make_item("moller.adjoint", battery, seed, worst, tolerance);
}

// Dense transpose identity P R = (P R*)^T on a small grid, P the pairing.
inline VerifyItem check_moller_adjoint_dense(const MollerMap& mm, long cap) {
  const MatC mr =
      to_dense_doubled([&](const DoubledSection& u) { return moller_apply(mm, u); },
                       mm.grid, Charge::uncharged, cap)
          .matrix;
  const MatC madj =
      to_dense_doubled([&](const DoubledSection& u) { return moller_adjoint_apply(mm, u); },
                       mm.grid, Charge::charged, cap)
          .matrix;
  const MatC lhs = detail::pairing_times(mm.rep, mm.grid, mr).transpose();
  const MatC rhs = detail::pairing_times(mm.rep, mm.grid, madj);
  return detail::make_item("moller.adjoint_dense", int(lhs.cols()), 0,
                           rel_residual(lhs, rhs), tol::dense_adjoint);
}

// Interacting retarded and advanced operators factor through the free ones.
inline VerifyItem verify_prop31(const MollerMap& mm, int battery, std::uint64_t seed,
                                double tolerance) {
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const DoubledSection f = detail::interior_random_doubled(mm.grid, rng, Charge::charged);
    const DoubledSection lr = mm.coupled_op.retarded_doubled(f, ConeCheck::off);
    const DoubledSection rr = moller_apply(
        mm, mm.free_op.retarded_doubled(detail::detag(f), ConeCheck::off));
    worst = std::max(worst, detail::doubled_rel(lr, rr));
    const DoubledSection la = mm.coupled_op.advanced_doubled(f, ConeCheck::off);
    const DoubledSection ra = detail::entag(
        mm.free_op.advanced_doubled(moller_adjoint_apply(mm, f), ConeCheck::off));
    worst = std::max(worst, detail::doubled_rel(la, ra));
  }
  return detail::make_item("moller.prop31", battery, seed, worst, tolerance);
}

inline VerifyItem verify_cor32(const MollerMap& mm, int battery, std::uint64_t seed,
                               double tolerance) {
  Rng rng(seed);
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    const DoubledSection f = detail::interior_random_doubled(mm.grid, rng, Charge::charged);
    const DoubledSection lhs = mm.coupled_op.causal_doubled(f, ConeCheck::off);
    const DoubledSection rhs = moller_apply(
        mm, mm.free_op.causal_doubled(moller_adjoint_apply(mm, f), ConeCheck::off));
    worst = std::max(worst, detail::doubled_rel(lhs, rhs));
  }
  return detail::make_item("moller.cor32", battery, seed, worst, tolerance);
}

// Whole-matrix versions of the factorizations, restricted to interior input.
inline VerifyItem verify_prop31_dense(const MollerMap& mm, long cap) {
  const Region inter = detail::interior_region(mm.grid);
  auto lhs_ret = [&](const DoubledSection& u) {
    return mm.coupled_op.retarded_doubled(detail::mask_doubled(u, inter), ConeCheck::off);
  };
  auto rhs_ret = [&](const DoubledSection& u) {
    return moller_apply(mm, mm.free_op.retarded_doubled(
                                detail::detag(detail::mask_doubled(u, inter)),
                                ConeCheck::off));
  };
  auto lhs_adv = [&](const DoubledSection& u) {
    return mm.coupled_op.advanced_doubled(detail::mask_doubled(u, inter), ConeCheck::off);
  };
  auto rhs_adv = [&](const DoubledSection& u) {
    return detail::entag(mm.free_op.advanced_doubled(
        moller_adjoint_apply(mm, detail::mask_doubled(u, inter)), ConeCheck::off));
  };
  const SpacetimeGrid& g = mm.grid;
  double worst = rel_residual(to_dense_doubled(lhs_ret, g, Charge::charged, cap).matrix,
                              to_dense_doubled(rhs_ret, g, Charge::charged, cap).matrix);
  worst = std::max(worst,
                   rel_residual(to_dense_doubled(lhs_adv, g, Charge::charged, cap).matrix,
                                to_dense_doubled(rhs_adv, g, Charge::charged, cap).matrix));
  return detail::make_item("moller.prop31_dense", int(2 * g.nvals()), 0, worst, tol::dense);
}

inline VerifyItem verify_cor32_dense(const MollerMap& mm, long cap) {
  const Region inter = detail::interior_region(mm.grid);
  auto lhs = [&](const DoubledSection& u) {
    return mm.coupled_op.causal_doubled(detail::mask_doubled(u, inter), ConeCheck::off);
  };
  auto rhs = [&](const DoubledSection& u) {
    return moller_apply(mm, mm.free_op.causal_doubled(
                                moller_adjoint_apply(mm, detail::mask_doubled(u, inter)),
                                ConeCheck::off));
  };
  const SpacetimeGrid& g = mm.grid;
  const double worst =
      rel_residual(to_dense_doubled(lhs, g, Charge::charged, cap).matrix,
                   to_dense_doubled(rhs, g, Charge::charged, cap).matrix);
  return detail::make_item("moller.cor32_dense", int(2 * g.nvals()), 0, worst, tol::dense);
}

inline VerifyItem check_gauge_diagnostic(const CliffordRep& rep, const SpacetimeGrid& g,
                                         double mass, const GaugePotential& pot,
                                         const GaugeFunction& alpha, int battery,
                                         std::uint64_t seed) {
  Rng rng(seed);
  const double worst = check_gauge_independence(rep, g, mass, pot, alpha, battery, rng);
  return detail::make_item("moller.gauge_diagnostic", battery, seed, worst,
                           tol::gauge_diag);
}

// ------------------------------------------------------------------ states

// Frequency splitting sanity per momentum slice: the projector is
// idempotent, the sign multiplier squares to it, and they commute.
inline VerifyItem check_state_projector(const CliffordRep& rep, const SpacetimeGrid& g,
                                        double mass, ZeroModePolicy policy) {
  SpectralSplit split(rep, g, mass, policy);
  double worst = 0.0;
  for (long kf = 0; kf < g.nspace(); ++kf) {
    const MatC e = split.symbol(kf);
    const auto [j, pi] =
        g.fiber == 2 ? split.sign_split_closed_form(e) : split.sign_split_eigen(e);
    worst = std::max(worst, (pi * pi - pi).cwiseAbs().maxCoeff());
    worst = std::max(worst, (j * j - pi).cwiseAbs().maxCoeff());
    worst = std::max(worst, (j * pi - j).cwiseAbs().maxCoeff());
    const MatC q = 0.5 * (pi + j);
    worst = std::max(worst, (q * q - q).cwiseAbs().maxCoeff());
  }
  return detail::make_item("state.projector", int(g.nspace()), 0, worst, tol::single);
}

// Bisolution property of a state kernel against the matching operator,
// complete over the interior subspace: K M_D and (M_D)^T K must vanish.
inline VerifyItem check_state_bisolution(const std::string& id, const TwoPointState& st,
                                         const DiracOp& op, long cap, double tolerance) {
  MatC md = to_dense_doubled(
                [&](const DoubledSection& u) { return op.apply_D_doubled(u); }, st.grid,
                st.charge, cap)
                .matrix;
  detail::restrict_interior_columns(md, st.grid);
  const double scale = std::max(st.kernel.norm() * md.norm(), 1e-300);
  const double right = detail::sparse_col_product(st.kernel, md).norm() / scale;
  const MatC kt = st.kernel.transpose();
  const double left = detail::sparse_col_product(kt, md).norm() / scale;
  return detail::make_item(id, int(md.cols()), 0, std::max(right, left), tolerance);
}

// Anticommutator identity: K + K^T equals the causal form built from the
// same materialization (free side), or its pullback (charged side).
inline VerifyItem check_state_anticommutator(const std::string& id, const TwoPointState& st,
                                             const MatC& causal_form, double tolerance) {
  const MatC sym = st.kernel + st.kernel.transpose();
  return detail::make_item(id, int(st.kernel.rows()), 0, rel_residual(sym, causal_form),
                           tolerance);
}

// With empty coupling support the pullback must reproduce the free state.
inline VerifyItem check_state_degeneracy(const CliffordRep& rep, const SpacetimeGrid& g,
                                         double mass, ZeroModePolicy policy, long cap) {
  const GaugePotential none(g, std::vector<double>(std::size_t(g.nsites() * g.dim), 0.0),
                            ConeCheck::off);
  const MollerMap mm(rep, g, mass, none);
  const TwoPointState omega = build_vacuum_state(rep, g, mass, policy, cap);
  const TwoPointState pulled = pullback_state(omega, mm, cap);
  return detail::make_item("state.degeneracy", int(omega.kernel.rows()), 0,
                           rel_residual(pulled.kernel, omega.kernel),
                           tol::state_degenerate);
}

inline VerifyItem check_state_hermiticity(const std::string& id, const TwoPointState& st) {
  return detail::report_only_item(
      id, 1, 0, hermiticity_residual(st),
      "h-hermiticity proxy, first-order in dt, report-only");
}

// ----------------------------------------------------------------- funcalg

namespace detail {

inline std::uint64_t random_mask(Rng& rng, int n, int p) {
  std::uint64_t m = 0;
  while (std::popcount(m) < p) m |= 1ULL << rng.below(std::uint64_t(n));
  return m;
}

inline FermionicFunctional random_homogeneous(const ModeBasis& b, Charge q, int degree,
                                              Rng& rng, int nterms = 3) {
  FermionicFunctional f = zero_functional(b, q);
  if (degree == 0) {
    f.set_term(0, rng.cgauss());
    return f;
  }
  for (int k = 0; k < nterms; ++k) f.add_term(random_mask(rng, b.nmodes, degree), rng.cgauss());
  return f;
}

inline FermionicFunctional random_mixed(const ModeBasis& b, Charge q, int degmax, Rng& rng) {
  FermionicFunctional f = zero_functional(b, q);
  for (int p = 0; p <= degmax; ++p) f += random_homogeneous(b, q, p, rng, 2);
  return f;
}

inline VecC random_coords(int n, Rng& rng) {
  VecC v(n);
  for (int j = 0; j < n; ++j) v(j) = rng.cgauss();
  return v;
}

inline double functional_rel(const FermionicFunctional& a, const FermionicFunctional& b) {
  const double scale = std::max({functional_max_abs(a), functional_max_abs(b), 1.0});
  return functional_distance(a, b) / scale;
}

inline double series_rel(const HbarSeries& a, const HbarSeries& b) {
  double scale = 1.0;
  for (const auto& f : a.orders) scale = std::max(scale, functional_max_abs(f));
  for (const auto& f : b.orders) scale = std::max(scale, functional_max_abs(f));
  return series_distance(a, b) / scale;
}

inline VecC degree_one_vector(const FermionicFunctional& f) {
  VecC v = VecC::Zero(f.nmodes);
  for (int j = 0; j < f.nmodes; ++j) v(j) = f.term(1ULL << j);
  return v;
}

}  // namespace detail

// Exact alternation of evaluation under argument swaps and repetitions.
inline VerifyItem check_funcalg_alternation(const ModeBasis& b, int battery,
                                            std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const FermionicFunctional f =
        detail::random_homogeneous(b, Charge::uncharged, 3, rng);
    const VecC u = detail::random_coords(b.nmodes, rng);
    const VecC v = detail::random_coords(b.nmodes, rng);
    const VecC w = detail::random_coords(b.nmodes, rng);
    const cplx swapped = evaluate(f, {u, v, w}) + evaluate(f, {v, u, w});
    worst = std::max(worst, std::abs(swapped));
    worst = std::max(worst, std::abs(evaluate(f, {u, u, w})));
  }
  return detail::make_item("funcalg.alternation", battery, seed, worst, 0.0);
}

// Wedge associativity and graded commutativity on random homogeneous pairs.
inline VerifyItem check_funcalg_wedge(const ModeBasis& b, int battery, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const int p = 1 + int(rng.below(2)), q = 1 + int(rng.below(2));
    const FermionicFunctional f = detail::random_homogeneous(b, Charge::uncharged, p, rng);
    const FermionicFunctional g = detail::random_homogeneous(b, Charge::uncharged, q, rng);
    const FermionicFunctional h = detail::random_homogeneous(b, Charge::uncharged, 1, rng);
    const double sgn = (p * q) % 2 == 0 ? 1.0 : -1.0;
    worst = std::max(worst, detail::functional_rel(wedge(f, g), sgn * wedge(g, f)));
    worst = std::max(worst,
                     detail::functional_rel(wedge(wedge(f, g), h), wedge(f, wedge(g, h))));
    worst = std::max(worst,
                     detail::functional_rel(wedge(f, unit_functional(b, Charge::uncharged)),
                                            f));
  }
  return detail::make_item("funcalg.wedge", battery, seed, worst, tol::funcalg);
}

inline VerifyItem check_funcalg_leibniz(const ModeBasis& b, int battery,
                                        std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const int p = 1 + int(rng.below(2));
    const FermionicFunctional f = detail::random_homogeneous(b, Charge::uncharged, p, rng);
    const FermionicFunctional g = detail::random_homogeneous(b, Charge::uncharged, 2, rng);
    const VecC h = detail::random_coords(b.nmodes, rng);
    const double sgn = p % 2 == 0 ? 1.0 : -1.0;
    const FermionicFunctional lhs = derivative(wedge(f, g), h);
    const FermionicFunctional rhs =
        wedge(derivative(f, h), g) + sgn * wedge(f, derivative(g, h));
    worst = std::max(worst, detail::functional_rel(lhs, rhs));
  }
  return detail::make_item("funcalg.leibniz", battery, seed, worst, tol::funcalg);
}

// Graded antisymmetry and graded Jacobi identity of the Peierls bracket,
// with the parity of a functional given by its degree.
inline VerifyItem check_funcalg_jacobi(const ModeBasis& b, int battery, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const int p = 1 + int(rng.below(2));
    const int q = 1 + int(rng.below(2));
    const int r = 1 + int(rng.below(2));
    const FermionicFunctional f = detail::random_homogeneous(b, Charge::uncharged, p, rng);
    const FermionicFunctional g = detail::random_homogeneous(b, Charge::uncharged, q, rng);
    const FermionicFunctional h = detail::random_homogeneous(b, Charge::uncharged, r, rng);
    const double apq = (p * q) % 2 == 0 ? 1.0 : -1.0;
    worst = std::max(worst,
                     detail::functional_rel(peierls(g, f, b), -apq * peierls(f, g, b)));
    auto sgn = [](int a, int c) { return (a * c) % 2 == 0 ? 1.0 : -1.0; };
    const FermionicFunctional jac =
        sgn(p, r) * peierls(f, peierls(g, h, b), b) +
        sgn(q, p) * peierls(g, peierls(h, f, b), b) +
        sgn(r, q) * peierls(h, peierls(f, g, b), b);
    worst = std::max(worst,
                     functional_distance(jac, zero_functional(b, Charge::uncharged)) /
                         std::max(1.0, functional_max_abs(jac)));
  }
  return detail::make_item("funcalg.jacobi", battery, seed, worst, tol::funcalg);
}

// Degree-one anticommutation relation: the symmetrized star of two linear
// functionals is a multiple of the unit fixed by the causal mode matrix.
inline VerifyItem check_funcalg_car(const ModeBasis& b, const TwoPointState& omega,
                                    const TwoPointState& omega_g, int battery,
                                    std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  struct Side {
    Charge q;
    const TwoPointState* st;
    const MatC* s;
  };
  const Side sides[2] = {{Charge::uncharged, &omega, &b.s_free},
                         {Charge::charged, &omega_g, &b.s_coupled}};
  for (int k = 0; k < battery; ++k)
    for (const Side& side : sides) {
      const FermionicFunctional f = detail::random_homogeneous(b, side.q, 1, rng);
      const FermionicFunctional g = detail::random_homogeneous(b, side.q, 1, rng);
      const HbarSeries anti =
          series_add(star(f, g, b, *side.st), star(g, f, b, *side.st));
      const VecC fv = detail::degree_one_vector(f);
      const VecC gv = detail::degree_one_vector(g);
      const cplx want =
          cplx(0.0, 1.0) *
          (fv.transpose() * (b.gram_inv * (*side.s) * b.gram_inv) * gv).value();
      HbarSeries expect;
      expect.orders.push_back(zero_functional(b, side.q));
      expect.orders.push_back(want * unit_functional(b, side.q));
      worst = std::max(worst, detail::series_rel(anti, expect));
    }
  return detail::make_item("funcalg.car", battery, seed, worst, tol::funcalg);
}

inline VerifyItem check_funcalg_star_assoc(const ModeBasis& b, const TwoPointState& st,
                                           Charge q, int battery, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const FermionicFunctional f = detail::random_mixed(b, q, 2, rng);
    const FermionicFunctional g = detail::random_mixed(b, q, 2, rng);
    const FermionicFunctional h = detail::random_mixed(b, q, 2, rng);
    const HbarSeries lhs = star(star(f, g, b, st), promote(h), b, st);
    const HbarSeries rhs = star(promote(f), star(g, h, b, st), b, st);
    worst = std::max(worst, detail::series_rel(lhs, rhs));
  }
  return detail::make_item("funcalg.star_assoc", battery, seed, worst, tol::funcalg);
}

inline VerifyItem check_funcalg_involution(const ModeBasis& b, int battery,
                                           std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const FermionicFunctional f = detail::random_mixed(b, Charge::uncharged, 3, rng);
    worst = std::max(
        worst, functional_distance(functional_involution(functional_involution(f, b), b), f));
  }
  return detail::make_item("funcalg.involution", battery, seed, worst, 0.0);
}

// The algebra-level Moller map exchanges the two star products built from a
// state and its pullback, is a bijection, and respects the involution.
inline VerifyItem check_funcalg_moller_homomorphism(const ModeBasis& b,
                                                    const TwoPointState& omega,
                                                    const TwoPointState& omega_g,
                                                    int battery, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const FermionicFunctional f = detail::random_mixed(b, Charge::charged, 3, rng);
    const FermionicFunctional g = detail::random_mixed(b, Charge::charged, 3, rng);
    HbarSeries lhs = star(f, g, b, omega_g);
    for (auto& order : lhs.orders) order = algebra_moller(order, b);
    const HbarSeries rhs = star(algebra_moller(f, b), algebra_moller(g, b), b, omega);
    worst = std::max(worst, detail::series_rel(lhs, rhs));
  }
  return detail::make_item("funcalg.moller_homomorphism", battery, seed, worst,
                           tol::funcalg_moller);
}

inline VerifyItem check_funcalg_moller_bijection(const ModeBasis& b, int battery,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const FermionicFunctional f = detail::random_mixed(b, Charge::charged, 3, rng);
    const FermionicFunctional u = detail::random_mixed(b, Charge::uncharged, 3, rng);
    worst = std::max(
        worst, detail::functional_rel(algebra_moller_inverse(algebra_moller(f, b), b), f));
    worst = std::max(
        worst, detail::functional_rel(algebra_moller(algebra_moller_inverse(u, b), b), u));
  }
  return detail::make_item("funcalg.moller_bijection", battery, seed, worst,
                           tol::funcalg_moller);
}

inline VerifyItem check_funcalg_moller_star_compat(const ModeBasis& b, int battery,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < battery; ++k) {
    const FermionicFunctional f = detail::random_mixed(b, Charge::charged, 2, rng);
    const FermionicFunctional lhs = algebra_moller(functional_involution(f, b), b);
    const FermionicFunctional rhs = functional_involution(algebra_moller(f, b), b);
    worst = std::max(worst, detail::functional_rel(lhs, rhs));
  }
  return detail::make_item("funcalg.moller_star_compat", battery, seed, worst, tol::single);
}

// --------------------------------------------------------------- monitors

// Empirical operator-norm ratios of the four solvers; no continuum constant
// is claimed, the ratios are reported for the boundedness ledger only.
inline VerifyItem check_boundedness_ratios(const MollerMap& mm, int battery,
                                           std::uint64_t seed, json& extras) {
  Rng rng(seed);
  double rf = 0.0, af = 0.0, rc = 0.0, ac = 0.0, mr = 0.0;
  for (int b = 0; b < battery; ++b) {
    const SpinorSection f =
        detail::interior_random(mm.grid, rng, Charge::uncharged, Leg::spinor);
    const SpinorSection fc =
        detail::interior_random(mm.grid, rng, Charge::charged, Leg::spinor);
    const double nf = std::max(f.norm(), 1e-300);
    const double nc = std::max(fc.norm(), 1e-300);
    rf = std::max(rf, mm.free_op.retarded(f, ConeCheck::off).norm() / nf);
    af = std::max(af, mm.free_op.advanced(f, ConeCheck::off).norm() / nf);
    rc = std::max(rc, mm.coupled_op.retarded(fc, ConeCheck::off).norm() / nc);
    ac = std::max(ac, mm.coupled_op.advanced(fc, ConeCheck::off).norm() / nc);
    const DoubledSection u = random_doubled(mm.grid, rng, Charge::uncharged);
    mr = std::max(mr, moller_apply(mm, u).norm() / std::max(u.norm(), 1e-300));
  }
  extras["boundedness_ratios"] = {{"retarded_free", rf},
                                  {"advanced_free", af},
                                  {"retarded_coupled", rc},
                                  {"advanced_coupled", ac},
                                  {"moller", mr}};
  return detail::report_only_item("lemma22.boundedness", battery, seed,
                                  std::max({rf, af, rc, ac, mr}),
                                  "largest empirical norm ratio, report-only");
}

// Self-convergence of the retarded solve under grid refinement on a fixed
// smooth source; the error ratio is reported, nothing is asserted. At unit
// cfl with zero mass the scheme is exact and the ratio degenerates.
inline VerifyItem check_convergence_monitor(double mass, json& extras) {
  const CliffordRep rep = build_rep(2);
  auto moll = [](double s) {
    const double r2 = s * s;
    return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  };
  auto solve = [&](int n) {
    const SpacetimeGrid g(2, n, {n}, 1.0 / n, 1.0 / n);
    const DiracOp op(rep, g, mass);
    SpinorSection f(g, Charge::uncharged, Leg::spinor);
    for (int t = 0; t < n; ++t)
      for (long x = 0; x < n; ++x) {
        const double v = moll((t * g.dt - 0.3) / 0.15) * moll((x * g.dx - 0.5) / 0.2);
        if (v != 0.0) f.at(t, x, 0) = cplx(v, 0.0);
      }
    return op.retarded(f, ConeCheck::off);
  };
  const SpinorSection u1 = solve(12), u2 = solve(24), u3 = solve(48);
  auto err = [](const SpinorSection& coarse, const SpinorSection& fine) {
    double e = 0.0;
    const SpacetimeGrid& g = coarse.grid;
    for (int t = 0; t < g.nt; ++t)
      for (long x = 0; x < g.nspace(); ++x)
        for (int c = 0; c < g.fiber; ++c)
          e = std::max(e, std::abs(coarse.at(t, x, c) - fine.at(2 * t, 2 * x, c)));
    return e;
  };
  const double e12 = err(u1, u2), e23 = err(u2, u3);
  const double ratio = e23 > 1e-14 ? e12 / e23 : 0.0;
  extras["convergence_monitor"] = {{"error_12_24", e12}, {"error_24_48", e23},
                                   {"ratio", ratio}};
  return detail::report_only_item(
      "convergence.monitor", 3, 0, ratio,
      "self-convergence error ratio under refinement, report-only");
}

// ------------------------------------------------------- per-module suites

inline std::vector<VerifyItem> clifford_suite() {
  const std::vector<CliffordRep> reps = {build_rep(2), build_rep(4),
                                         build_rep(2, Signature::mostly_plus)};
  return {check_clifford_relations(reps), check_clifford_hermiticity(reps)};
}

inline std::vector<VerifyItem> green_suite(const RunConfig& cfg) {
  auto seed_for = [&](const char* id) { return detail::item_seed(cfg, id); };
  const double ctol = composed_tol(cfg);
  const CliffordRep rep = rep_of(cfg);
  const SpacetimeGrid g = grid_of(cfg);
  const MollerMap mm(rep, g, cfg.mass, potential_of(cfg, g));
  std::vector<VerifyItem> items;
  items.push_back(check_green_identities("green.identities_free", mm.free_op,
                                         Charge::uncharged, cfg.battery,
                                         seed_for("green.identities_free"), ctol));
  items.push_back(check_green_identities("green.identities_coupled", mm.coupled_op,
                                         Charge::charged, cfg.battery,
                                         seed_for("green.identities_coupled"), ctol));
  items.push_back(check_green_retardation("green.retardation_free", mm.free_op,
                                          Charge::uncharged, cfg.battery,
                                          seed_for("green.retardation_free")));
  items.push_back(check_green_retardation("green.retardation_coupled", mm.coupled_op,
                                          Charge::charged, cfg.battery,
                                          seed_for("green.retardation_coupled")));
  items.push_back(check_green_characteristics(seed_for("green.characteristics")));
  return items;
}

inline std::vector<VerifyItem> moller_suite(const RunConfig& cfg) {
  auto seed_for = [&](const char* id) { return detail::item_seed(cfg, id); };
  const double ctol = composed_tol(cfg);
  const CliffordRep rep = rep_of(cfg);
  const SpacetimeGrid g = grid_of(cfg);
  const GaugePotential pot = potential_of(cfg, g);
  const MollerMap mm(rep, g, cfg.mass, pot);
  std::vector<VerifyItem> items;
  items.push_back(check_moller_intertwining(mm, cfg.battery,
                                            seed_for("moller.intertwining"), ctol));
  items.push_back(check_moller_retardation(mm, cfg.battery,
                                           seed_for("moller.retardation")));
  items.push_back(check_moller_inverse(mm, cfg.battery, seed_for("moller.inverse"), ctol));
  items.push_back(check_moller_interaction(mm, cfg.battery,
                                           seed_for("moller.interaction"), ctol));
  items.push_back(check_moller_adjoint(mm, cfg.battery, seed_for("moller.adjoint"), ctol));
  items.push_back(check_gauge_diagnostic(rep, g, cfg.mass, pot, alpha_of(cfg, g),
                                         cfg.battery, seed_for("moller.gauge_diagnostic")));
  return items;
}

inline std::vector<VerifyItem> propagator_suite(const RunConfig& cfg) {
  auto seed_for = [&](const char* id) { return detail::item_seed(cfg, id); };
  const double ctol = composed_tol(cfg);
  const CliffordRep rep = rep_of(cfg);
  const SpacetimeGrid g = grid_of(cfg);
  const MollerMap mm(rep, g, cfg.mass, potential_of(cfg, g));
  std::vector<VerifyItem> items;
  items.push_back(verify_prop31(mm, cfg.battery, seed_for("moller.prop31"), ctol));
  items.push_back(verify_cor32(mm, cfg.battery, seed_for("moller.cor32"), ctol));
  const SpacetimeGrid gd = dense_grid_of(cfg);
  const MollerMap mmd(rep, gd, cfg.mass, potential_of(cfg, gd));
  items.push_back(verify_prop31_dense(mmd, cfg.oracle_cap));
  items.push_back(verify_cor32_dense(mmd, cfg.oracle_cap));
  items.push_back(check_moller_adjoint_dense(mmd, cfg.oracle_cap));
  return items;
}

inline SuiteResult state_suite(const RunConfig& cfg) {
  SuiteResult out;
  const CliffordRep rep = rep_of(cfg);
  const SpacetimeGrid gs = state_grid_of(cfg);
  const ZeroModePolicy policy = policy_of(cfg);
  const MollerMap mms(rep, gs, cfg.mass, potential_of(cfg, gs));
  out.items.push_back(check_state_projector(rep, gs, cfg.mass, policy));
  const VacuumAssembly vac =
      build_vacuum_assembly(rep, gs, cfg.mass, policy, cfg.oracle_cap);
  const TwoPointState pulled = pullback_state(vac.state, mms, cfg.oracle_cap);
  out.items.push_back(check_state_bisolution("state.bisolution_free", vac.state,
                                             mms.free_op, cfg.oracle_cap, tol::state));
  out.items.push_back(check_state_anticommutator("state.anticommutator_free", vac.state,
                                                 vac.causal_form, tol::single));
  out.items.push_back(check_state_bisolution("state.bisolution_pullback", pulled,
                                             mms.coupled_op, cfg.oracle_cap, tol::state));
  {
    const MatC m = to_dense_doubled(
                       [&](const DoubledSection& u) { return moller_adjoint_apply(mms, u); },
                       gs, Charge::charged, cfg.oracle_cap)
                       .matrix;
    const MatC pulled_causal = m.transpose() * vac.causal_form * m;
    out.items.push_back(check_state_anticommutator("state.anticommutator_pullback", pulled,
                                                   pulled_causal, tol::state));
  }
  out.items.push_back(check_state_degeneracy(rep, gs, cfg.mass, policy, cfg.oracle_cap));
  out.items.push_back(check_state_hermiticity("state.hermiticity", vac.state));
  const auto [lo, hi] = kernel_spectrum_bounds(vac.state);
  out.extras["state_spectrum_bounds"] = {{"min", lo}, {"max", hi}};
  out.extras["state_zero_modes"] = vac.state.zero_modes;
  return out;
}

// The two-point states and the mode basis every functional check runs over.
struct FuncalgContext {
  TwoPointState omega;
  TwoPointState omega_g;
  ModeBasis basis;
};

inline FuncalgContext build_funcalg_context(const RunConfig& cfg) {
  const CliffordRep rep = rep_of(cfg);
  const SpacetimeGrid gf = funcalg_grid_of(cfg);
  const GaugePotential potf = potential_of(cfg, gf);
  const MollerMap mmf(rep, gf, cfg.mass, potf);
  const ZeroModePolicy policy = policy_of(cfg);
  TwoPointState omega = build_vacuum_state(rep, gf, cfg.mass, policy, cfg.oracle_cap);
  TwoPointState omega_g = pullback_state(omega, mmf, cfg.oracle_cap);
  std::vector<DoubledSection> modes = site_delta_modes(gf, funcalg_mode_sites(cfg, gf));
  modes.resize(std::size_t(cfg.funcalg.n_modes), DoubledSection(gf, Charge::uncharged));
  ModeBasis basis = build_mode_basis(rep, gf, cfg.mass, potf, std::move(modes), omega,
                                     omega_g, cfg.funcalg.p_max);
  return {std::move(omega), std::move(omega_g), std::move(basis)};
}

inline std::vector<VerifyItem> funcalg_core_suite(const RunConfig& cfg,
                                                  const FuncalgContext& fc) {
  auto seed_for = [&](const char* id) { return detail::item_seed(cfg, id); };
  const int fb = std::min(cfg.battery, 16);
  std::vector<VerifyItem> items;
  items.push_back(check_funcalg_alternation(fc.basis, fb, seed_for("funcalg.alternation")));
  items.push_back(check_funcalg_wedge(fc.basis, fb, seed_for("funcalg.wedge")));
  items.push_back(check_funcalg_leibniz(fc.basis, fb, seed_for("funcalg.leibniz")));
  items.push_back(check_funcalg_jacobi(fc.basis, fb, seed_for("funcalg.jacobi")));
  items.push_back(
      check_funcalg_car(fc.basis, fc.omega, fc.omega_g, fb, seed_for("funcalg.car")));
  items.push_back(check_funcalg_star_assoc(fc.basis, fc.omega, Charge::uncharged, fb,
                                           seed_for("funcalg.star_assoc")));
  items.push_back(check_funcalg_involution(fc.basis, fb, seed_for("funcalg.involution")));
  return items;
}

inline std::vector<VerifyItem> funcalg_moller_suite(const RunConfig& cfg,
                                                    const FuncalgContext& fc) {
  auto seed_for = [&](const char* id) { return detail::item_seed(cfg, id); };
  std::vector<VerifyItem> items;
  items.push_back(check_funcalg_moller_homomorphism(
      fc.basis, fc.omega, fc.omega_g, cfg.funcalg.battery,
      seed_for("funcalg.moller_homomorphism")));
  items.push_back(check_funcalg_moller_bijection(fc.basis, cfg.funcalg.battery,
                                                 seed_for("funcalg.moller_bijection")));
  items.push_back(check_funcalg_moller_star_compat(fc.basis, cfg.funcalg.battery,
                                                   seed_for("funcalg.moller_star_compat")));
  return items;
}

inline SuiteResult monitor_suite(const RunConfig& cfg) {
  SuiteResult out;
  const CliffordRep rep = rep_of(cfg);
  const SpacetimeGrid g = grid_of(cfg);
  const MollerMap mm(rep, g, cfg.mass, potential_of(cfg, g));
  out.items.push_back(check_boundedness_ratios(
      mm, cfg.battery, detail::item_seed(cfg, "lemma22.boundedness"), out.extras));
  out.items.push_back(check_convergence_monitor(cfg.mass, out.extras));
  return out;
}

// ---------------------------------------------------------- the full suite

inline SuiteResult run_full_suite(const RunConfig& cfg) {
  SuiteResult out;
  auto absorb = [&](std::vector<VerifyItem> v) {
    for (auto& it : v) out.items.push_back(std::move(it));
  };
  auto absorb_suite = [&](SuiteResult s) {
    for (auto& it : s.items) out.items.push_back(std::move(it));
    out.extras.update(s.extras);
  };
  absorb(clifford_suite());
  absorb(green_suite(cfg));
  absorb(moller_suite(cfg));
  absorb(propagator_suite(cfg));
  absorb_suite(state_suite(cfg));
  const FuncalgContext fc = build_funcalg_context(cfg);
  absorb(funcalg_core_suite(cfg, fc));
  absorb(funcalg_moller_suite(cfg, fc));
  absorb_suite(monitor_suite(cfg));
  return out;
}

}  // namespace slab
