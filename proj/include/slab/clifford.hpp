#pragma once

// Finite-dimensional Clifford module data: gamma matrices over a flat metric
// together with the hermitian spinor metric h that makes gamma(v) h-hermitian
// for real covectors v. Fiber dimension is 2^(d/2) for d in {2,4}.

#include <string>
#include <vector>

#include "slab/common.hpp"

namespace slab {

enum class Signature { mostly_minus, mostly_plus };

inline const char* to_string(Signature s) {
  return s == Signature::mostly_minus ? "mostly_minus" : "mostly_plus";
}

struct CliffordRep {
  int dim = 0;    // spacetime dimension d
  int fiber = 0;  // 2^(d/2)
  Signature sig = Signature::mostly_minus;
  std::string name;            // "d2_real", "d4_dirac", "d2_mostly_plus"
  std::vector<double> eta;     // metric diagonal, time first
  std::vector<MatC> gamma;     // gamma^a, index down position a = 0..d-1
  MatC h;                      // spinor metric, (gamma(v))^dag h = h gamma(v)
  MatC h_inv;

  // gamma with the index raised by the (diagonal, +-1) metric
  MatC gamma_raised(int a) const { return eta[std::size_t(a)] * gamma[std::size_t(a)]; }
};

namespace detail {

inline MatC sigma(int i) {
  MatC m(2, 2);
  switch (i) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace detail

// Builds the pinned representation for the requested dimension and signature
// ordering. The ordering is a recorded convention carried into every report.
inline CliffordRep build_rep(int dim, Signature sig = Signature::mostly_minus) {
  CliffordRep r;
  r.dim = dim;
  r.sig = sig;
  if (dim == 2 && sig == Signature::mostly_minus) {
    // all-real representation; gamma^0 gamma^1 = diag(-1, +1), so the two
    // fiber components are exact characteristic movers (left, right)
    r.fiber = 2;
    r.name = "d2_real";
    r.eta = {1.0, -1.0};
    MatC g0 = detail::sigma(1);
    MatC g1(2, 2);
    g1 << 0, 1, -1, 0;
    r.gamma = {g0, g1};
    r.h = g0;
  } else if (dim == 2 && sig == Signature::mostly_plus) {
    r.fiber = 2;
    r.name = "d2_mostly_plus";
    r.eta = {-1.0, 1.0};
    r.gamma = {cplx(0, 1) * detail::sigma(1), detail::sigma(3)};
    r.h = detail::sigma(3);
  } else if (dim == 4 && sig == Signature::mostly_minus) {
    r.fiber = 4;
    r.name = "d4_dirac";
    r.eta = {1.0, -1.0, -1.0, -1.0};
    MatC g0 = MatC::Zero(4, 4);
    g0.diagonal() << 1, 1, -1, -1;
    r.gamma.push_back(g0);
    for (int i = 1; i <= 3; ++i) {
      MatC gi = MatC::Zero(4, 4);
      MatC s = detail::sigma(i);
      gi.block(0, 2, 2, 2) = s;
      gi.block(2, 0, 2, 2) = -s;
      r.gamma.push_back(gi);
    }
    r.h = g0;
  } else {
    throw ConfigError("build_rep: unsupported dimension/signature combination");
  }
  r.h_inv = r.h.inverse();
  return r;
}

// gamma(v) for a covector v (index raised by the metric before contraction)
inline MatC gamma_of(const CliffordRep& rep, const VecC& v) {
  if (v.size() != rep.dim) throw ShapeError("gamma_of: covector size mismatch");
  MatC m = MatC::Zero(rep.fiber, rep.fiber);
  for (int a = 0; a < rep.dim; ++a) m += v[a] * rep.gamma_raised(a);
  return m;
}

// Clifford action gamma(v) s on a single fiber vector
inline VecC clifford_mul(const CliffordRep& rep, const VecC& v, const VecC& s) {
  if (s.size() != rep.fiber) throw ShapeError("clifford_mul: fiber size mismatch");
  return gamma_of(rep, v) * s;
}

// Fiber pairing of a spinor against a conjugate-fiber vector. Bilinear in the
// stored components of both arguments; conjugation is carried by w's storage
// convention, never applied here.
inline cplx spinor_pairing(const CliffordRep& rep, const VecC& u, const VecC& w) {
  if (u.size() != rep.fiber || w.size() != rep.fiber)
    throw ShapeError("spinor_pairing: fiber size mismatch");
  return u.transpose() * rep.h * w;
}

// q(v,v) for a covector under the inverse metric (diagonal +-1 entries)
inline cplx quadratic_form(const CliffordRep& rep, const VecC& v) {
  cplx q = 0.0;
  for (int a = 0; a < rep.dim; ++a) q += rep.eta[std::size_t(a)] * v[a] * v[a];
  return q;
}

}  // namespace slab
