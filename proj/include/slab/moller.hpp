#pragma once

// Moller maps: exact two-sided intertwiners between the free and the coupled
// theory on the slab.
//
// On the spinor leg,
//   R   = i - Sg- A i          (uncharged -> charged)
//   Rhat = p + S- p A          (charged -> uncharged, exact inverse)
// where i / p are the entwiners of fields.hpp (bundle re-tagging), A is the
// pointwise potential action, S- the free retarded solve and Sg- the coupled
// one. On the cospinor leg the same shapes hold with Abar and the cospinor
// Green operators. The dual maps with respect to the bilinear pairing are
//   Rbar* = p - p A Sg+        (charged spinor -> uncharged spinor)
//   R*    = p - p Abar Sgbar+  (charged cospinor -> uncharged cospinor)
// and each equals the h-weighted transpose of its partner, a fact the test
// suite checks on materialized kernels. Doubled sections transform leg by
// leg; the doubled dual is dual with respect to the doubled pairing.
//
// All internal Green-operator calls run with source validation off: the
// compositions are identities on arbitrary sections and must not impose the
// public cone preconditions on intermediate stages.

#include <utility>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/fields.hpp"
#include "slab/gauge.hpp"
#include "slab/green.hpp"
#include "slab/grid.hpp"

namespace slab {

struct MollerMap {
  CliffordRep rep;
  SpacetimeGrid grid;
  double mass = 0.0;
  GaugePotential pot;
  DiracOp free_op;
  DiracOp coupled_op;

  MollerMap(const CliffordRep& r, const SpacetimeGrid& g, double m, GaugePotential p)
      : rep(r),
        grid(g),
        mass(m),
        pot(std::move(p)),
        free_op(r, g, m),
        coupled_op(r, g, m, pot) {}
};

// ------------------------------------------------------------ forward maps

// R on the spinor leg, Rbar on the cospinor leg; uncharged in, charged out.
inline SpinorSection moller_apply(const MollerMap& mm, const SpinorSection& u) {
  if (u.charge != Charge::uncharged) throw BundleError("moller: expected an uncharged section");
  SpinorSection w = entwine_i(u);
  if (u.leg == Leg::spinor) {
    SpinorSection z =
        mm.coupled_op.retarded(apply_A(mm.rep, mm.pot, w), ConeCheck::off);
    w -= z;
  } else {
    SpinorSection z =
        mm.coupled_op.retarded_co(apply_Abar(mm.rep, mm.pot, w), ConeCheck::off);
    w -= z;
  }
  return w;
}

// Exact inverse: Rhat on the spinor leg, Rbarhat on the cospinor leg.
inline SpinorSection moller_inverse_apply(const MollerMap& mm, const SpinorSection& u) {
  if (u.charge != Charge::charged) throw BundleError("moller: expected a charged section");
  SpinorSection out = entwine_p(u);
  if (u.leg == Leg::spinor) {
    SpinorSection z = mm.free_op.retarded(entwine_p(apply_A(mm.rep, mm.pot, u)), ConeCheck::off);
    out += z;
  } else {
    SpinorSection z =
        mm.free_op.retarded_co(entwine_p(apply_Abar(mm.rep, mm.pot, u)), ConeCheck::off);
    out += z;
  }
  return out;
}

// ---------------------------------------------------------------- dual maps

// Dual of the opposite-leg forward map: Rbar* on the spinor leg, R* on the
// cospinor leg; charged in, uncharged out.
inline SpinorSection moller_adjoint_apply(const MollerMap& mm, const SpinorSection& u) {
  if (u.charge != Charge::charged) throw BundleError("moller: expected a charged section");
  SpinorSection out = entwine_p(u);
  if (u.leg == Leg::spinor) {
    SpinorSection z = mm.coupled_op.advanced(u, ConeCheck::off);
    out -= entwine_p(apply_A(mm.rep, mm.pot, z));
  } else {
    SpinorSection z = mm.coupled_op.advanced_co(u, ConeCheck::off);
    out -= entwine_p(apply_Abar(mm.rep, mm.pot, z));
  }
  return out;
}

// Inverse of the dual map: Rbarhat* = i + A i S+ on the spinor leg,
// Rhat* = i + Abar i Sbar+ on the cospinor leg; uncharged in, charged out.
inline SpinorSection moller_adjoint_inverse_apply(const MollerMap& mm, const SpinorSection& u) {
  if (u.charge != Charge::uncharged) throw BundleError("moller: expected an uncharged section");
  SpinorSection out = entwine_i(u);
  if (u.leg == Leg::spinor) {
    SpinorSection z = entwine_i(mm.free_op.advanced(u, ConeCheck::off));
    out += apply_A(mm.rep, mm.pot, z);
  } else {
    SpinorSection z = entwine_i(mm.free_op.advanced_co(u, ConeCheck::off));
    out += apply_Abar(mm.rep, mm.pot, z);
  }
  return out;
}

// ------------------------------------------------------------- doubled maps

inline DoubledSection moller_apply(const MollerMap& mm, const DoubledSection& u) {
  return DoubledSection(moller_apply(mm, u.sp), moller_apply(mm, u.co));
}
inline DoubledSection moller_inverse_apply(const MollerMap& mm, const DoubledSection& u) {
  return DoubledSection(moller_inverse_apply(mm, u.sp), moller_inverse_apply(mm, u.co));
}
inline DoubledSection moller_adjoint_apply(const MollerMap& mm, const DoubledSection& u) {
  return DoubledSection(moller_adjoint_apply(mm, u.sp), moller_adjoint_apply(mm, u.co));
}
inline DoubledSection moller_adjoint_inverse_apply(const MollerMap& mm, const DoubledSection& u) {
  return DoubledSection(moller_adjoint_inverse_apply(mm, u.sp),
                        moller_adjoint_inverse_apply(mm, u.co));
}

// --------------------------------------------------------------- scattering

// o = -S- p A, the interaction kernel of the resolvent expansion
// R - i = R o i on uncharged spinor sections.
inline SpinorSection moller_interaction_apply(const MollerMap& mm, const SpinorSection& u) {
  if (u.charge != Charge::charged || u.leg != Leg::spinor)
    throw BundleError("moller: interaction kernel expects a charged spinor section");
  SpinorSection z = mm.free_op.retarded(entwine_p(apply_A(mm.rep, mm.pot, u)), ConeCheck::off);
  z *= cplx(-1.0, 0.0);
  return z;
}

}  // namespace slab
