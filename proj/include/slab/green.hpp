#pragma once

// The discrete Dirac operator and its Green operators.
//
// Time stepping is a two-level scheme: the equation row at slice t reads
//   (D psi)_t = (i/dt) g0 (psi_{t+1} - Sc psi_t) - m psi_t + A_t psi_t
// for t = 0 .. nt-2, with the last row identically zero, where Sc is the
// product over spatial directions of upwind transport factors
//   (1-c) I + c (P+ T_{+e} + P- T_{-e}),      c = dt/dx,
// built from the projectors P+- = (I +- eta00 g0 g^i)/2 and the unit shifts
// (T_e psi)(x) = psi(x - e). Every factor moves data by at most one cell per
// step, so causal support statements are exact set inclusions.
//
// Solving the row for psi_{t+1} gives the one-step evolution
//   psi_{t+1} = E_t psi_t + G f_t,
//   E_t = Sc - i dt eta00 g0 (m - A_t),   G = -i dt eta00 g0,
// so the retarded solve is forward substitution with zero past data and the
// advanced solve is backward substitution with zero future data, using the
// cached per-slice LU factors of E_t. Cospinor-leg operators are realized
// through h-weighted transposes: X* = h^{-1} X^T h with respect to the
// bilinear pairing of fields.hpp.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/fields.hpp"
#include "slab/gauge.hpp"
#include "slab/grid.hpp"

namespace slab {

// Velocity matrix of spatial direction i; squares to the identity for every
// supported representation, so (I +- alpha)/2 are transport projectors.
inline MatC velocity_matrix(const CliffordRep& rep, int i) {
  return rep.eta[0] * rep.gamma[0] * rep.gamma[std::size_t(1 + i)];
}

// Materialized linear map between section spaces, plain stored components
// (any volume weight or metric contraction lives inside the matrix).
struct DenseKernel {
  MatC matrix;
  std::string domain_tag;
  std::string codomain_tag;
  std::string weight_convention = "plain-components";
};

class DiracOp {
 public:
  CliffordRep rep;
  SpacetimeGrid grid;
  double mass = 0.0;
  GaugePotential pot;  // empty support for the uncharged operator
  Charge charge = Charge::uncharged;
  std::string stencil =
      "two-level in time; upwind characteristic splitting per spatial "
      "direction (locality radius 1); pointwise mass/potential step";

  DiracOp(const CliffordRep& r, const SpacetimeGrid& g, double m)
      : rep(r), grid(g), mass(m), charge(Charge::uncharged) {
    init();
  }

  DiracOp(const CliffordRep& r, const SpacetimeGrid& g, double m, GaugePotential p)
      : rep(r), grid(g), mass(m), pot(std::move(p)), charge(Charge::charged) {
    if (!pot.grid.same_shape(g)) throw ShapeError("dirac: potential grid mismatch");
    init();
  }

  // ---------------------------------------------------------------- apply

  SpinorSection apply_D(const SpinorSection& s) const {
    require(s, Leg::spinor);
    SpinorSection out(grid, charge, Leg::spinor);
    std::vector<cplx> tmp(slice_len());
    const int f = grid.fiber;
    for (int t = 0; t < grid.nt - 1; ++t) {
      sc_apply(slice(s, t), tmp.data());
      const cplx* cur = slice(s, t);
      const cplx* nxt = slice(s, t + 1);
      cplx* o = slice(out, t);
      for (long x = 0; x < ns_; ++x) {
        Eigen::Map<const VecC> pc(cur + x * f, f), pn(nxt + x * f, f);
        Eigen::Map<const VecC> pt(tmp.data() + x * f, f);
        Eigen::Map<VecC> po(o + x * f, f);
        po = ig0dt_ * (pn - pt) - mass * pc;
        if (const MatC* a = pot_A(t, x)) po += (*a) * pc;
      }
    }
    return out;
  }

  // Plain transpose of apply_D on the same index space (no metric factors).
  SpinorSection apply_D_transpose(const SpinorSection& s) const {
    require(s, Leg::spinor);
    SpinorSection out(grid, charge, Leg::spinor);
    std::vector<cplx> tmp(slice_len()), tmp2(slice_len());
    const int f = grid.fiber;
    const MatC g0T_dt = ig0dt_.transpose();
    for (int t = 0; t < grid.nt; ++t) {
      cplx* o = slice(out, t);
      if (t <= grid.nt - 2) {
        const cplx* cur = slice(s, t);
        for (long x = 0; x < ns_; ++x) {
          Eigen::Map<const VecC> pc(cur + x * f, f);
          Eigen::Map<VecC> pt(tmp.data() + x * f, f);
          pt = g0T_dt * pc;
        }
        sc_apply_T(tmp.data(), tmp2.data());
        for (long x = 0; x < ns_; ++x) {
          Eigen::Map<const VecC> pc(cur + x * f, f);
          Eigen::Map<const VecC> p2(tmp2.data() + x * f, f);
          Eigen::Map<VecC> po(o + x * f, f);
          po = -p2 - mass * pc;
          if (const MatC* a = pot_A(t, x)) po += a->transpose() * pc;
        }
      }
      if (t >= 1) {
        const cplx* prv = slice(s, t - 1);
        for (long x = 0; x < ns_; ++x) {
          Eigen::Map<const VecC> pp(prv + x * f, f);
          Eigen::Map<VecC> po(o + x * f, f);
          po += g0T_dt * pp;
        }
      }
    }
    return out;
  }

  // Dual operator on the cospinor leg: D* = h^{-1} D^T h.
  SpinorSection apply_D_star(const SpinorSection& c) const {
    require(c, Leg::cospinor);
    SpinorSection w = hmul(c, /*leg=*/Leg::spinor);
    w = apply_D_transpose(w);
    return hinvmul(w, Leg::cospinor);
  }

  // Doubled operator diag(D, -D*).
  DoubledSection apply_D_doubled(const DoubledSection& u) const {
    SpinorSection co = apply_D_star(u.co);
    co *= cplx(-1.0, 0.0);
    return DoubledSection(apply_D(u.sp), std::move(co));
  }

  // ---------------------------------------------------------------- solves

  // S-: unique solution with zero past data; support moves forward.
  SpinorSection retarded(const SpinorSection& f, ConeCheck check = ConeCheck::enforce) const {
    require(f, Leg::spinor);
    if (check != ConeCheck::off) check_retarded_source(f.support(), check);
    SpinorSection out(grid, charge, Leg::spinor);
    std::vector<cplx> acc(slice_len());
    const int fb = grid.fiber;
    for (int t = 0; t < grid.nt - 1; ++t) {
      E_apply(t, slice(out, t), acc.data());
      const cplx* src = slice(f, t);
      cplx* nxt = slice(out, t + 1);
      for (long x = 0; x < ns_; ++x) {
        Eigen::Map<const VecC> pf(src + x * fb, fb);
        Eigen::Map<const VecC> pa(acc.data() + x * fb, fb);
        Eigen::Map<VecC> po(nxt + x * fb, fb);
        po = pa + G_ * pf;
      }
    }
    return out;
  }

  // S+: zero future data; support moves backward. Sources on the final
  // slice have no equation row and are ignored by construction.
  SpinorSection advanced(const SpinorSection& f, ConeCheck check = ConeCheck::enforce) const {
    require(f, Leg::spinor);
    if (check != ConeCheck::off) check_advanced_source(f.support(), check);
    SpinorSection out(grid, charge, Leg::spinor);
    VecC rhs(ns_ * grid.fiber);
    const int fb = grid.fiber;
    for (int t = grid.nt - 2; t >= 0; --t) {
      const cplx* nxt = slice(out, t + 1);
      const cplx* src = slice(f, t);
      for (long x = 0; x < ns_; ++x) {
        Eigen::Map<const VecC> pn(nxt + x * fb, fb);
        Eigen::Map<const VecC> pf(src + x * fb, fb);
        rhs.segment(x * fb, fb) = pn - G_ * pf;
      }
      VecC sol = lu_for(t).solve(rhs);
      std::copy(sol.data(), sol.data() + sol.size(), slice(out, t));
    }
    return out;
  }

  SpinorSection causal(const SpinorSection& f, ConeCheck check = ConeCheck::enforce) const {
    require(f, Leg::spinor);
    if (check != ConeCheck::off) {
      const Region supp = f.support();
      check_retarded_source(supp, check);
      check_advanced_source(supp, check);
    }
    SpinorSection out = retarded(f, ConeCheck::off);
    out -= advanced(f, ConeCheck::off);
    return out;
  }

  // Cospinor-leg Green operators, duals of the spinor ones under the
  // bilinear pairing: retarded_co = h^{-1} (S+)^T h (supported forward),
  // advanced_co = h^{-1} (S-)^T h (supported backward).
  SpinorSection retarded_co(const SpinorSection& f, ConeCheck check = ConeCheck::enforce) const {
    require(f, Leg::cospinor);
    if (check != ConeCheck::off) check_retarded_source(f.support(), check);
    SpinorSection w = hmul(f, Leg::spinor);
    SpinorSection out(grid, charge, Leg::spinor);
    const int fb = grid.fiber;
    const long len = ns_ * fb;
    const MatC GT = G_.transpose();
    VecC chi(len), next(len);
    for (int s = 0; s <= grid.nt - 2; ++s) {
      Eigen::Map<const VecC> phi(slice(w, s), len);
      if (s == 0)
        chi = phi;
      else
        chi = phi + next;
      VecC sol = lu_for(s).transpose().solve(chi);
      cplx* o = slice(out, s);
      for (long x = 0; x < ns_; ++x)
        Eigen::Map<VecC>(o + x * fb, fb) = -GT * sol.segment(x * fb, fb);
      next = sol;
    }
    return hinvmul(out, Leg::cospinor);
  }

  SpinorSection advanced_co(const SpinorSection& f, ConeCheck check = ConeCheck::enforce) const {
    require(f, Leg::cospinor);
    if (check != ConeCheck::off) check_advanced_source(f.support(), check);
    SpinorSection w = hmul(f, Leg::spinor);
    SpinorSection out(grid, charge, Leg::spinor);
    const int fb = grid.fiber;
    const long len = ns_ * fb;
    const MatC GT = G_.transpose();
    std::vector<cplx> tmp(slice_len());
    VecC xi = VecC::Zero(len);
    for (int s = grid.nt - 2; s >= 0; --s) {
      Eigen::Map<const VecC> phi_next(slice(w, s + 1), len);
      if (s == grid.nt - 2) {
        xi = phi_next;
      } else {
        E_apply_T(s + 1, xi.data(), tmp.data());
        xi = phi_next + Eigen::Map<const VecC>(tmp.data(), len);
      }
      cplx* o = slice(out, s);
      for (long x = 0; x < ns_; ++x)
        Eigen::Map<VecC>(o + x * fb, fb) = GT * xi.segment(x * fb, fb);
    }
    return hinvmul(out, Leg::cospinor);
  }

  SpinorSection causal_co(const SpinorSection& f, ConeCheck check = ConeCheck::enforce) const {
    require(f, Leg::cospinor);
    if (check != ConeCheck::off) {
      const Region supp = f.support();
      check_retarded_source(supp, check);
      check_advanced_source(supp, check);
    }
    SpinorSection out = retarded_co(f, ConeCheck::off);
    out -= advanced_co(f, ConeCheck::off);
    return out;
  }

  // Doubled Green operators for diag(D, -D*): the cospinor blocks are the
  // negated cospinor-leg solves, and causal = retarded - advanced lands on
  // diag(S, +h^{-1} S^T h).
  DoubledSection retarded_doubled(const DoubledSection& u, ConeCheck check = ConeCheck::enforce) const {
    SpinorSection co = retarded_co(u.co, check);
    co *= cplx(-1.0, 0.0);
    return DoubledSection(retarded(u.sp, check), std::move(co));
  }
  DoubledSection advanced_doubled(const DoubledSection& u, ConeCheck check = ConeCheck::enforce) const {
    SpinorSection co = advanced_co(u.co, check);
    co *= cplx(-1.0, 0.0);
    return DoubledSection(advanced(u.sp, check), std::move(co));
  }
  DoubledSection causal_doubled(const DoubledSection& u, ConeCheck check = ConeCheck::enforce) const {
    DoubledSection out = retarded_doubled(u, check);
    out -= advanced_doubled(u, check);
    return out;
  }

  // ------------------------------------------------------------ utilities

  // Pointwise h and h^{-1} contractions; the result is re-tagged to `leg`.
  SpinorSection hmul(const SpinorSection& s, Leg leg) const {
    SpinorSection out(grid, s.charge, leg);
    const int f = grid.fiber;
    for (long site = 0; site < grid.nsites(); ++site)
      Eigen::Map<VecC>(out.data.data() + site * f, f) =
          rep.h * Eigen::Map<const VecC>(s.data.data() + site * f, f);
    return out;
  }
  SpinorSection hinvmul(const SpinorSection& s, Leg leg) const {
    SpinorSection out(grid, s.charge, leg);
    const int f = grid.fiber;
    for (long site = 0; site < grid.nsites(); ++site)
      Eigen::Map<VecC>(out.data.data() + site * f, f) =
          rep.h_inv * Eigen::Map<const VecC>(s.data.data() + site * f, f);
    return out;
  }

  const MatC& coupling_G() const { return G_; }

 private:
  long ns_ = 0;
  MatC G_;       // -i dt eta00 g0
  MatC ig0dt_;   // (i/dt) g0
  MatC Kconst_;  // -i dt eta00 m g0, the local part of E on free slices
  std::vector<MatC> Pp_, Pm_;                 // per spatial direction
  std::map<int, std::vector<MatC>> pot_A_;    // slice -> per-site A matrix
  std::map<int, std::vector<MatC>> pot_L_;    // slice -> per-site local E extra
  Eigen::PartialPivLU<MatC> free_lu_;
  std::map<int, Eigen::PartialPivLU<MatC>> pot_lu_;

  void require(const SpinorSection& s, Leg leg) const {
    if (!s.grid.same_shape(grid)) throw ShapeError("dirac: section grid mismatch");
    if (s.leg != leg) throw BundleError("dirac: wrong section leg");
    if (s.charge != charge) throw BundleError("dirac: charge tag mismatch");
  }

  long slice_len() const { return ns_ * grid.fiber; }
  static const cplx* slice(const SpinorSection& s, int t) {
    return s.data.data() + std::size_t(t) * std::size_t(s.grid.nspace() * s.grid.fiber);
  }
  static cplx* slice(SpinorSection& s, int t) {
    return s.data.data() + std::size_t(t) * std::size_t(s.grid.nspace() * s.grid.fiber);
  }

  const MatC* pot_A(int t, long x) const {
    auto it = pot_A_.find(t);
    if (it == pot_A_.end()) return nullptr;
    const MatC& m = it->second[std::size_t(x)];
    return m.size() == 0 ? nullptr : &m;
  }

  void init() {
    ns_ = grid.nspace();
    const int f = grid.fiber;
    const double eta00 = rep.eta[0];
    const MatC& g0 = rep.gamma[0];
    G_ = cplx(0.0, -grid.dt * eta00) * g0;
    ig0dt_ = cplx(0.0, 1.0 / grid.dt) * g0;
    Kconst_ = cplx(0.0, -grid.dt * eta00 * mass) * g0;
    for (int i = 0; i < grid.dim - 1; ++i) {
      MatC alpha = velocity_matrix(rep, i);
      Pp_.push_back(0.5 * (MatC::Identity(f, f) + alpha));
      Pm_.push_back(0.5 * (MatC::Identity(f, f) - alpha));
    }
    // per-slice potential caches
    for (long site : pot.supp_list) {
      const int t = int(site / ns_);
      const long x = site % ns_;
      auto& av = pot_A_[t];
      auto& lv = pot_L_[t];
      if (av.empty()) {
        av.resize(std::size_t(ns_));
        lv.resize(std::size_t(ns_));
      }
      MatC a = pot.site_matrix(rep, site);
      lv[std::size_t(x)] = cplx(0.0, grid.dt * eta00) * g0 * a;
      av[std::size_t(x)] = std::move(a);
    }
    // dense one-step matrices and their LU factors
    MatC freeE = dense_E_free();
    free_lu_.compute(freeE);
    check_invertible(free_lu_, "free");
    for (const auto& [t, lv] : pot_L_) {
      MatC Et = freeE;
      for (long x = 0; x < ns_; ++x) {
        const MatC& l = lv[std::size_t(x)];
        if (l.size() != 0) Et.block(x * f, x * f, f, f) += l;
      }
      auto& lu = pot_lu_[t];
      lu.compute(Et);
      check_invertible(lu, "potential slice");
    }
  }

  static void check_invertible(const Eigen::PartialPivLU<MatC>& lu, const char* what) {
    const double rc = lu.rcond();
    if (!(rc > 1e-13))
      throw NumericError(std::string("dirac: one-step evolution matrix (") + what +
                         ") is numerically singular");
  }

  MatC dense_E_free() {
    const int f = grid.fiber;
    const long n = ns_ * f;
    MatC m(n, n);
    std::vector<cplx> e(std::size_t(n), cplx(0.0, 0.0));
    std::vector<cplx> col(e.size());
    for (long j = 0; j < n; ++j) {
      e[std::size_t(j)] = 1.0;
      sc_apply(e.data(), col.data());
      Eigen::Map<VecC> cm(col.data(), n);
      for (long x = 0; x < ns_; ++x)
        cm.segment(x * f, f) += Kconst_ * Eigen::Map<const VecC>(e.data() + x * f, f);
      m.col(j) = cm;
      e[std::size_t(j)] = 0.0;
    }
    return m;
  }

  const Eigen::PartialPivLU<MatC>& lu_for(int t) const {
    auto it = pot_lu_.find(t);
    return it == pot_lu_.end() ? free_lu_ : it->second;
  }

  // one upwind factor: out(x) = (1-c) in(x) + c (P+ in(x-e) + P- in(x+e));
  // transposed: out(x) = (1-c) in(x) + c (P+^T in(x+e) + P-^T in(x-e))
  void factor_apply(int i, const cplx* in, cplx* out, bool transposed) const {
    const int f = grid.fiber;
    const double c = grid.cfl();
    long stride = 1;
    for (int j = i + 1; j < grid.dim - 1; ++j) stride *= grid.nx[std::size_t(j)];
    const int n = grid.nx[std::size_t(i)];
    const MatC Pa = transposed ? MatC(Pp_[std::size_t(i)].transpose()) : Pp_[std::size_t(i)];
    const MatC Pb = transposed ? MatC(Pm_[std::size_t(i)].transpose()) : Pm_[std::size_t(i)];
    for (long x = 0; x < ns_; ++x) {
      const int xi = int((x / stride) % n);
      long xm = -1, xp = -1;
      if (grid.topo == Topology::periodic) {
        xm = x + long(((xi + n - 1) % n) - xi) * stride;
        xp = x + long(((xi + 1) % n) - xi) * stride;
      } else {
        if (xi > 0) xm = x - stride;
        if (xi < n - 1) xp = x + stride;
      }
      const long src_a = transposed ? xp : xm;  // P+ pulls from here
      const long src_b = transposed ? xm : xp;  // P- pulls from here
      Eigen::Map<VecC> po(out + x * f, f);
      po = (1.0 - c) * Eigen::Map<const VecC>(in + x * f, f);
      if (src_a >= 0) po += c * (Pa * Eigen::Map<const VecC>(in + src_a * f, f));
      if (src_b >= 0) po += c * (Pb * Eigen::Map<const VecC>(in + src_b * f, f));
    }
  }

  void sc_apply(const cplx* in, cplx* out) const {
    const long len = slice_len();
    if (grid.dim == 2) {
      factor_apply(0, in, out, false);
      return;
    }
    std::vector<cplx> a(in, in + len);
    std::vector<cplx> b(a.size());
    for (int i = 0; i < grid.dim - 1; ++i) {
      factor_apply(i, a.data(), b.data(), false);
      a.swap(b);
    }
    std::copy(a.begin(), a.end(), out);
  }

  void sc_apply_T(const cplx* in, cplx* out) const {
    const long len = slice_len();
    if (grid.dim == 2) {
      factor_apply(0, in, out, true);
      return;
    }
    std::vector<cplx> a(in, in + len);
    std::vector<cplx> b(a.size());
    for (int i = grid.dim - 2; i >= 0; --i) {
      factor_apply(i, a.data(), b.data(), true);
      a.swap(b);
    }
    std::copy(a.begin(), a.end(), out);
  }

  void E_apply(int t, const cplx* in, cplx* out) const {
    sc_apply(in, out);
    const int f = grid.fiber;
    auto it = pot_L_.find(t);
    for (long x = 0; x < ns_; ++x) {
      Eigen::Map<const VecC> pi(in + x * f, f);
      Eigen::Map<VecC> po(out + x * f, f);
      po += Kconst_ * pi;
      if (it != pot_L_.end()) {
        const MatC& l = it->second[std::size_t(x)];
        if (l.size() != 0) po += l * pi;
      }
    }
  }

  void E_apply_T(int t, const cplx* in, cplx* out) const {
    sc_apply_T(in, out);
    const int f = grid.fiber;
    const MatC KT = Kconst_.transpose();
    auto it = pot_L_.find(t);
    for (long x = 0; x < ns_; ++x) {
      Eigen::Map<const VecC> pi(in + x * f, f);
      Eigen::Map<VecC> po(out + x * f, f);
      po += KT * pi;
      if (it != pot_L_.end()) {
        const MatC& l = it->second[std::size_t(x)];
        if (l.size() != 0) po += l.transpose() * pi;
      }
    }
  }

  void check_retarded_source(const Region& supp, ConeCheck check) const {
    const auto [t_min, t_max] = supp.time_extent();
    (void)t_max;
    if (t_min < 0) return;  // zero source
    if (t_min < 1)
      throw DomainError("green: retarded solve needs an empty slice before the source");
    if (check != ConeCheck::enforce) return;
    if (!forward_cone_fits(supp))
      throw DomainError("green: forward cone of the source wraps around the torus");
    if (grid.topo == Topology::bounded && !cone_inside_bounded(supp, /*forward=*/true))
      throw DomainError("green: forward cone of the source exits the slab");
  }

  void check_advanced_source(const Region& supp, ConeCheck check) const {
    const auto [t_min, t_max] = supp.time_extent();
    (void)t_min;
    if (t_max < 0) return;
    if (t_max > grid.nt - 2)
      throw DomainError("green: advanced solve needs an empty slice after the source");
    if (check != ConeCheck::enforce) return;
    if (!backward_cone_fits(supp))
      throw DomainError("green: backward cone of the source wraps around the torus");
    if (grid.topo == Topology::bounded && !cone_inside_bounded(supp, /*forward=*/false))
      throw DomainError("green: backward cone of the source exits the slab");
  }

  // Conservative bounding-box test: the cone grown from the whole support
  // box for the maximal number of remaining steps must stay inside the slab.
  bool cone_inside_bounded(const Region& supp, bool forward) const {
    const auto [t_min, t_max] = supp.time_extent();
    const int steps = forward ? grid.nt - 1 - t_min : t_max;
    for (int i = 0; i < grid.dim - 1; ++i) {
      int lo = grid.nx[std::size_t(i)], hi = -1;
      for (int t = 0; t < grid.nt; ++t)
        for (long xf = 0; xf < ns_; ++xf)
          if (supp.at(grid.site(t, xf))) {
            const int xi = grid.xcoords(xf)[std::size_t(i)];
            lo = std::min(lo, xi);
            hi = std::max(hi, xi);
          }
      if (hi < 0) continue;
      if (lo - steps < 0 || hi + steps > grid.nx[std::size_t(i)] - 1) return false;
    }
    return true;
  }
};

// --------------------------------------------------------------- dense oracle

inline constexpr long kDenseCapDefault = 20000;

// Materialize a linear section map column by column on basis sections.
inline DenseKernel to_dense(const std::function<SpinorSection(const SpinorSection&)>& fn,
                            const SpacetimeGrid& g, Charge q, Leg l,
                            long cap = kDenseCapDefault) {
  const long n = g.nvals();
  if (n > cap) throw ConfigError("to_dense: index dimension exceeds the oracle cap");
  DenseKernel k;
  SpinorSection basis(g, q, l);
  for (long j = 0; j < n; ++j) {
    basis.data[std::size_t(j)] = 1.0;
    SpinorSection col = fn(basis);
    basis.data[std::size_t(j)] = 0.0;
    if (j == 0) {
      k.matrix.resize(long(col.data.size()), n);
      k.codomain_tag = std::string(to_string(col.charge)) + "/" + to_string(col.leg);
    }
    k.matrix.col(j) = Eigen::Map<const VecC>(col.data.data(), long(col.data.size()));
  }
  k.domain_tag = std::string(to_string(q)) + "/" + to_string(l);
  return k;
}

// Doubled variant; index order is the spinor block then the cospinor block.
inline DenseKernel to_dense_doubled(
    const std::function<DoubledSection(const DoubledSection&)>& fn, const SpacetimeGrid& g,
    Charge q, long cap = kDenseCapDefault) {
  const long n = 2 * g.nvals();
  if (n > cap) throw ConfigError("to_dense: index dimension exceeds the oracle cap");
  DenseKernel k;
  k.matrix.resize(n, n);
  DoubledSection basis(g, q);
  const long half = g.nvals();
  for (long j = 0; j < n; ++j) {
    cplx& slot = j < half ? basis.sp.data[std::size_t(j)] : basis.co.data[std::size_t(j - half)];
    slot = 1.0;
    DoubledSection col = fn(basis);
    slot = 0.0;
    k.matrix.col(j).head(half) = Eigen::Map<const VecC>(col.sp.data.data(), half);
    k.matrix.col(j).tail(half) = Eigen::Map<const VecC>(col.co.data.data(), half);
  }
  k.domain_tag = std::string(to_string(q)) + "/doubled";
  k.codomain_tag = k.domain_tag;
  return k;
}

// ---------------------------------------------------- gauge-change diagnostic

// Gauge independence of the coupled operator: conjugating the charged Dirac
// operator built from the shifted potential by the phase e^{i alpha} should
// reproduce the original operator. With sampled alpha and centered-difference
// gradients this holds up to a discretization residual of order
// dt^2 (|d2 alpha| + |d alpha|^2) relative to ||D psi||; it is exact for
// constant alpha. Returns the maximum relative residual over the battery.
inline double check_gauge_independence(const CliffordRep& rep, const SpacetimeGrid& g,
                                       double mass, const GaugePotential& pot,
                                       const GaugeFunction& chi, int battery, Rng& rng) {
  DiracOp op(rep, g, mass, pot);
  DiracOp op2(rep, g, mass, gauge_transform(pot, chi));
  double worst = 0.0;
  for (int b = 0; b < battery; ++b) {
    SpinorSection psi = random_section(g, rng, Charge::charged, Leg::spinor);
    SpinorSection rhs = op.apply_D(psi);
    SpinorSection lhs = apply_phase(op2.apply_D(apply_phase(psi, chi, -1.0)), chi, +1.0);
    worst = std::max(worst, rel_residual(lhs.data, rhs.data));
  }
  return worst;
}

}  // namespace slab
