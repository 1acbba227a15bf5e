#pragma once

// Functional algebra over a finite mode family.
//
// Observables are totally antisymmetric multilinear functionals on the span
// of a small list of doubled sections. A functional is stored sparsely as a
// map from index sets (bit masks over the modes) to complex coefficients,
// which realizes canonical antisymmetric storage: one coefficient per
// strictly ascending multi-index. On top of that sit the products:
//
//   wedge     graded product; the sign comes from merging ascending index
//             sets and is computed exactly from an inversion count
//   peierls   bracket contracting first derivatives through the causal form
//   star      formal power series in hbar whose insertions contract through
//             a state's mode kernel; the order-0 coefficient is the wedge
//
// hbar stays formal throughout: star returns the list of coefficient
// functionals and never sums them with a numeric hbar. At this finite size
// any statement about spacelike-separated localization is empty, so nothing
// of that kind is checked or exposed here.
//
// The frozen sign and ordering conventions for the insertions live in
// tolerances.hpp next to the numeric thresholds.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/fields.hpp"
#include "slab/gauge.hpp"
#include "slab/green.hpp"
#include "slab/grid.hpp"
#include "slab/hadamard.hpp"
#include "slab/moller.hpp"
#include "slab/tolerances.hpp"

namespace slab {

namespace detail {

inline std::uint64_t next_basis_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// set bits of m strictly above position j, safe for j = 63
inline int bits_above(std::uint64_t m, int j) {
  return j >= 63 ? 0 : std::popcount(m >> (j + 1));
}

inline int bits_below(std::uint64_t m, int j) {
  return std::popcount(m & ((std::uint64_t(1) << j) - 1));
}

// sign of a left derivative slot: (-1)^(position of j in the ascending set)
inline int strip_sign_left(std::uint64_t mask, int j) {
  return (bits_below(mask, j) & 1) ? -1 : 1;
}

// sign of a right derivative slot: (-1)^(set bits above j)
inline int strip_sign_right(std::uint64_t mask, int j) {
  return (bits_above(mask, j) & 1) ? -1 : 1;
}

// sign that sorts the concatenation of two disjoint ascending index sets:
// (-1)^(number of pairs i in a, j in b with i > j)
inline int merge_sign(std::uint64_t a, std::uint64_t b) {
  int inv = 0;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    inv += bits_above(a, j);
  }
  return (inv & 1) ? -1 : 1;
}

inline std::vector<int> mask_bits(std::uint64_t m) {
  std::vector<int> out;
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

// visit every p-element subset of {0, ..., n-1} as a bit mask, ascending
template <class Fn>
inline void for_each_index_subset(int n, int p, Fn&& fn) {
  if (p < 0 || p > n) return;
  if (p == 0) {
    fn(std::uint64_t(0));
    return;
  }
  const std::size_t np = std::size_t(p);
  std::vector<int> idx(np);
  for (int k = 0; k < p; ++k) idx[std::size_t(k)] = k;
  for (;;) {
    std::uint64_t mask = 0;
    for (int k = 0; k < p; ++k) mask |= std::uint64_t(1) << idx[std::size_t(k)];
    fn(mask);
    int i = p - 1;
    while (i >= 0 && idx[std::size_t(i)] == n - p + i) --i;
    if (i < 0) break;
    ++idx[std::size_t(i)];
    for (int k = i + 1; k < p; ++k) idx[std::size_t(k)] = idx[std::size_t(k - 1)] + 1;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// functionals

// Sparse antisymmetric functional. Each key is a bit mask over the modes and
// stands for the ascending multi-index of its set bits; the value is the
// coefficient of the corresponding basis monomial. Exact zeros are pruned so
// that structural identities stay bitwise where the arithmetic is exact.
struct FermionicFunctional {
  Charge charge = Charge::uncharged;
  std::uint64_t basis_id = 0;
  int nmodes = 0;
  int p_max = 6;
  std::map<std::uint64_t, cplx> terms;

  void set_term(std::uint64_t mask, cplx v) {
    check_mask(mask);
    if (v == cplx(0.0, 0.0))
      terms.erase(mask);
    else
      terms[mask] = v;
  }

  void add_term(std::uint64_t mask, cplx v) {
    check_mask(mask);
    auto it = terms.find(mask);
    if (it == terms.end()) {
      if (v != cplx(0.0, 0.0)) terms.emplace(mask, v);
      return;
    }
    it->second += v;
    if (it->second == cplx(0.0, 0.0)) terms.erase(it);
  }

  cplx term(std::uint64_t mask) const {
    auto it = terms.find(mask);
    return it == terms.end() ? cplx(0.0, 0.0) : it->second;
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, v] : terms) d = std::max(d, std::popcount(m));
    return d;
  }

  bool is_zero() const { return terms.empty(); }

  void check_mask(std::uint64_t mask) const {
    if (nmodes < 64 && (mask >> nmodes) != 0)
      throw ConfigError("funcalg: term index outside the mode range");
    if (std::popcount(mask) > p_max)
      throw TruncationError("funcalg: degree exceeds the truncation order");
  }

  void require_compatible(const FermionicFunctional& o) const {
    if (basis_id != o.basis_id)
      throw ConfigError("funcalg: functionals belong to different mode bases");
    if (charge != o.charge)
      throw BundleError("funcalg: functionals live on different bundles");
  }

  FermionicFunctional& operator+=(const FermionicFunctional& o) {
    require_compatible(o);
    for (const auto& [m, v] : o.terms) add_term(m, v);
    return *this;
  }
  FermionicFunctional& operator-=(const FermionicFunctional& o) {
    require_compatible(o);
    for (const auto& [m, v] : o.terms) add_term(m, -v);
    return *this;
  }
  FermionicFunctional& operator*=(cplx z) {
    if (z == cplx(0.0, 0.0)) {
      terms.clear();
      return *this;
    }
    for (auto& [m, v] : terms) v *= z;
    return *this;
  }
  friend FermionicFunctional operator+(FermionicFunctional a, const FermionicFunctional& b) {
    return a += b;
  }
  friend FermionicFunctional operator-(FermionicFunctional a, const FermionicFunctional& b) {
    return a -= b;
  }
  friend FermionicFunctional operator*(cplx z, FermionicFunctional a) { return a *= z; }
  friend FermionicFunctional operator-(FermionicFunctional a) { return a *= cplx(-1.0, 0.0); }
};

inline double functional_max_abs(const FermionicFunctional& f) {
  double m = 0.0;
  for (const auto& [k, v] : f.terms) m = std::max(m, std::abs(v));
  return m;
}

// largest coefficient difference; the usual residual for identity checks
inline double functional_distance(const FermionicFunctional& a, const FermionicFunctional& b) {
  a.require_compatible(b);
  double m = 0.0;
  for (const auto& [k, v] : a.terms) m = std::max(m, std::abs(v - b.term(k)));
  for (const auto& [k, v] : b.terms) m = std::max(m, std::abs(v - a.term(k)));
  return m;
}

// Formal power series in hbar. orders[n] is the coefficient functional of
// hbar^n; the list never collapses into a numeric sum.
struct HbarSeries {
  std::vector<FermionicFunctional> orders;

  int max_order() const { return int(orders.size()) - 1; }

  FermionicFunctional at(int n) const {
    if (n >= 0 && n < int(orders.size())) return orders[std::size_t(n)];
    if (orders.empty()) throw ConfigError("funcalg: series has no terms to take tags from");
    FermionicFunctional z = orders.front();
    z.terms.clear();
    return z;
  }
};

inline double series_distance(const HbarSeries& a, const HbarSeries& b) {
  const int top = std::max(a.max_order(), b.max_order());
  double m = 0.0;
  for (int n = 0; n <= top; ++n) m = std::max(m, functional_distance(a.at(n), b.at(n)));
  return m;
}

inline HbarSeries series_add(const HbarSeries& a, const HbarSeries& b) {
  HbarSeries out;
  const int top = std::max(a.max_order(), b.max_order());
  for (int n = 0; n <= top; ++n) out.orders.push_back(a.at(n) + b.at(n));
  return out;
}

inline HbarSeries promote(FermionicFunctional f) {
  HbarSeries s;
  s.orders.push_back(std::move(f));
  return s;
}

// ---------------------------------------------------------------------------
// mode basis

// A finite family of doubled sections together with every kernel the algebra
// needs, all expressed as small matrices in this family's coordinates. The
// gram matrix H of the global pairing defines the coordinates; the causal
// kernels, the state kernels and the three Moller matrices are cached at
// build time and checked against their operator definitions.
struct ModeBasis {
  CliffordRep rep;
  SpacetimeGrid grid;
  double mass = 0.0;
  GaugePotential pot;
  int nmodes = 0;
  int p_max = 6;
  std::uint64_t id = 0;
  bool self_conjugate = false;
  bool moller_trivial = false;  // empty coupling support, Moller maps retag only
  std::vector<DoubledSection> modes;          // uncharged family
  std::vector<DoubledSection> charged_modes;  // the same sections, retagged

  MatC gram;      // H(j, k) = <m_j, m_k>
  MatC gram_inv;  // explicit inverse, the family is small by design
  MatC s_free;    // causal kernel of the free operator
  MatC s_coupled; // causal kernel of the coupled operator
  MatC omega;     // state kernel, uncharged side
  MatC omega_g;   // pulled-back state kernel, charged side
  MatC r_mode;      // interacting Moller map in coordinates
  MatC r_star_mode; // its adjoint in coordinates
  MatC r_hat_mode;  // its inverse in coordinates
  std::uint64_t omega_state_id = 0;
  std::uint64_t omega_g_state_id = 0;

  const std::vector<DoubledSection>& family(Charge q) const {
    return q == Charge::charged ? charged_modes : modes;
  }

  // coordinates of u with respect to the family matching its charge
  VecC coordinates(const DoubledSection& u) const {
    if (!u.grid().same_shape(grid)) throw ShapeError("funcalg: section grid mismatch");
    const auto& fam = family(u.sp.charge);
    VecC b(nmodes);
    for (int j = 0; j < nmodes; ++j) b(j) = global_pairing(rep, fam[std::size_t(j)], u);
    return lu_.solve(b);
  }

  // relative distance between u and its reconstruction from coordinates c
  double reconstruction_residual(const DoubledSection& u, const VecC& c) const {
    const auto& fam = family(u.sp.charge);
    DoubledSection w(grid, u.sp.charge);
    for (int j = 0; j < nmodes; ++j) {
      const cplx z = c(j);
      const auto& m = fam[std::size_t(j)];
      for (std::size_t k = 0; k < w.sp.data.size(); ++k) {
        w.sp.data[k] += z * m.sp.data[k];
        w.co.data[k] += z * m.co.data[k];
      }
    }
    const double scale = std::max(u.norm(), 1e-300);
    return (w - u).norm() / scale;
  }

  Eigen::PartialPivLU<MatC> lu_;  // factor of gram, kept for coordinate solves
};

// state kernel restricted to a mode family
inline MatC state_mode_kernel(const TwoPointState& st, const CliffordRep&,
                              const std::vector<DoubledSection>& fam) {
  const int n = int(fam.size());
  MatC k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      k(i, j) = st(fam[std::size_t(i)], fam[std::size_t(j)]);
  return k;
}

namespace detail {

inline void require_interior_support(const SpacetimeGrid& g, const DoubledSection& m) {
  int t_min = g.nt, t_max = -1;
  const long chunk = g.nspace() * g.fiber;
  for (int t = 0; t < g.nt; ++t) {
    bool any = false;
    for (long k = 0; k < chunk && !any; ++k) {
      const std::size_t idx = std::size_t(t * chunk + k);
      any = m.sp.data[idx] != cplx(0.0, 0.0) || m.co.data[idx] != cplx(0.0, 0.0);
    }
    if (any) {
      t_min = std::min(t_min, t);
      t_max = std::max(t_max, t);
    }
  }
  if (t_max < 0) throw ConfigError("funcalg: a mode vanishes identically");
  if (t_min < 1 || t_max > g.nt - 2)
    throw ConfigError("funcalg: modes must be supported strictly inside the time slab");
}

inline bool bitwise_self_conjugate(const DoubledSection& m) {
  const DoubledSection s = involution(m);
  for (std::size_t k = 0; k < m.sp.data.size(); ++k)
    if (s.sp.data[k] != m.sp.data[k] || s.co.data[k] != m.co.data[k]) return false;
  return true;
}

}  // namespace detail

// Build the basis and every cached kernel. The coupled-side state must be
// the pullback of the free-side state, and the family must be closed under
// the Moller maps up to the composed tolerance; both are hard errors because
// every algebraic identity downstream silently degrades without them.
inline ModeBasis build_mode_basis(const CliffordRep& rep, const SpacetimeGrid& grid,
                                  double mass, const GaugePotential& pot,
                                  std::vector<DoubledSection> modes,
                                  const TwoPointState& omega, const TwoPointState& omega_g,
                                  int p_max = 6) {
  const int n = int(modes.size());
  if (n == 0) throw ConfigError("funcalg: empty mode family");
  if (n > 64) throw ConfigError("funcalg: more than 64 modes");
  if (p_max < 1 || p_max > n)
    throw ConfigError("funcalg: truncation order must lie in [1, nmodes]");
  for (const auto& m : modes) {
    if (!m.grid().same_shape(grid)) throw ShapeError("funcalg: mode grid mismatch");
    if (m.sp.charge != Charge::uncharged)
      throw BundleError("funcalg: modes must be uncharged sections");
    detail::require_interior_support(grid, m);
  }
  if (omega.charge != Charge::uncharged)
    throw BundleError("funcalg: free-side state must be uncharged");
  if (omega_g.charge != Charge::charged)
    throw BundleError("funcalg: coupled-side state must be charged");
  if (!omega.grid.same_shape(grid) || !omega_g.grid.same_shape(grid))
    throw ShapeError("funcalg: state grid mismatch");
  if (omega_g.provenance != StateProvenance::pullback || omega_g.parent_id != omega.state_id)
    throw ConfigError("funcalg: coupled-side state is not the pullback of the free-side state");

  ModeBasis b;
  b.rep = rep;
  b.grid = grid;
  b.mass = mass;
  b.pot = pot;
  b.nmodes = n;
  b.p_max = p_max;
  b.id = detail::next_basis_id();
  b.moller_trivial = pot.is_zero();
  b.modes = std::move(modes);
  b.charged_modes.reserve(std::size_t(n));
  for (const auto& m : b.modes) b.charged_modes.push_back(entwine_i(m));
  b.self_conjugate = true;
  for (const auto& m : b.modes)
    if (!detail::bitwise_self_conjugate(m)) {
      b.self_conjugate = false;
      break;
    }

  b.gram.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b.gram(i, j) = global_pairing(rep, b.modes[std::size_t(i)], b.modes[std::size_t(j)]);
  b.lu_.compute(b.gram);
  if (b.lu_.rcond() < tol::rcond_floor)
    throw DomainError("funcalg: mode gram matrix is numerically singular");
  b.gram_inv = b.lu_.inverse();

  const DiracOp free_op(rep, grid, mass);
  const MollerMap mm(rep, grid, mass, pot);

  b.s_free.resize(n, n);
  b.s_coupled.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const DoubledSection sf =
        free_op.causal_doubled(b.modes[std::size_t(j)], ConeCheck::allow_wraparound);
    const DoubledSection sc = mm.coupled_op.causal_doubled(b.charged_modes[std::size_t(j)],
                                                           ConeCheck::allow_wraparound);
    for (int i = 0; i < n; ++i) {
      b.s_free(i, j) = global_pairing(rep, b.modes[std::size_t(i)], sf);
      b.s_coupled(i, j) = global_pairing(rep, b.charged_modes[std::size_t(i)], sc);
    }
  }

  b.omega = state_mode_kernel(omega, rep, b.modes);
  b.omega_g = state_mode_kernel(omega_g, rep, b.charged_modes);
  b.omega_state_id = omega.state_id;
  b.omega_g_state_id = omega_g.state_id;

  b.r_mode.resize(n, n);
  b.r_star_mode.resize(n, n);
  b.r_hat_mode.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const DoubledSection ri = moller_apply(mm, b.modes[std::size_t(j)]);
    const DoubledSection rs = moller_adjoint_apply(mm, b.charged_modes[std::size_t(j)]);
    const DoubledSection rh = moller_inverse_apply(mm, b.charged_modes[std::size_t(j)]);
    const VecC ci = b.coordinates(ri);
    const VecC cs = b.coordinates(rs);
    const VecC ch = b.coordinates(rh);
    if (b.reconstruction_residual(ri, ci) > tol::composed ||
        b.reconstruction_residual(rs, cs) > tol::composed ||
        b.reconstruction_residual(rh, ch) > tol::composed)
      throw NumericError("funcalg: a Moller image leaves the mode span");
    b.r_mode.col(j) = ci;
    b.r_star_mode.col(j) = cs;
    b.r_hat_mode.col(j) = ch;
  }

  const double s_scale = std::max({1.0, b.s_free.cwiseAbs().maxCoeff(),
                                   b.s_coupled.cwiseAbs().maxCoeff()});
  const double res_free =
      (b.omega + b.omega.transpose() - cplx(0.0, 1.0) * b.s_free).cwiseAbs().maxCoeff();
  const double res_coup =
      (b.omega_g + b.omega_g.transpose() - cplx(0.0, 1.0) * b.s_coupled).cwiseAbs().maxCoeff();
  if (res_free / s_scale > tol::composed || res_coup / s_scale > tol::composed)
    throw NumericError("funcalg: state kernels are inconsistent with the causal kernels");
  const double res_inv =
      (b.r_hat_mode * b.r_mode - MatC::Identity(n, n)).cwiseAbs().maxCoeff();
  if (res_inv > tol::composed)
    throw NumericError("funcalg: Moller mode matrices fail the inverse relation");

  return b;
}

// Convenience builder: vacuum state on the free side, its pullback on the
// coupled side.
inline ModeBasis build_mode_basis_vacuum(const CliffordRep& rep, const SpacetimeGrid& grid,
                                         double mass, const GaugePotential& pot,
                                         std::vector<DoubledSection> modes,
                                         ZeroModePolicy policy = ZeroModePolicy::half_weight,
                                         int p_max = 6, long cap = kDenseCapDefault) {
  const TwoPointState omega = build_vacuum_state(rep, grid, mass, policy, cap);
  const MollerMap mm(rep, grid, mass, pot);
  const TwoPointState omega_g = pullback_state(omega, mm, cap);
  return build_mode_basis(rep, grid, mass, pot, std::move(modes), omega, omega_g, p_max);
}

// ---------------------------------------------------------------------------
// mode constructors

// Every fiber component of a unit delta at each listed (t, xflat) site. The
// cospinor leg copies the spinor leg, so the family is self-conjugate, and
// taking all components per site keeps the gram block-diagonal with one
// invertible h-block per site.
inline std::vector<DoubledSection> site_delta_modes(
    const SpacetimeGrid& g, const std::vector<std::pair<int, long>>& sites,
    Charge q = Charge::uncharged) {
  std::vector<DoubledSection> out;
  out.reserve(sites.size() * std::size_t(g.fiber));
  for (const auto& [t, xf] : sites) {
    if (t < 1 || t > g.nt - 2)
      throw ConfigError("funcalg: delta sites must be strictly inside the time slab");
    if (xf < 0 || xf >= g.nspace())
      throw ConfigError("funcalg: delta site outside the spatial sections");
    for (int c = 0; c < g.fiber; ++c) {
      DoubledSection m(g, q);
      m.sp.at(t, xf, c) = cplx(1.0, 0.0);
      m.co.at(t, xf, c) = cplx(1.0, 0.0);
      out.push_back(std::move(m));
    }
  }
  return out;
}

// Smooth real bump on one fiber component, product of mollifiers in every
// coordinate. Centers and widths are in index units; the profile vanishes
// identically outside the open support window.
inline DoubledSection bump_mode(const SpacetimeGrid& g, int comp, double t_center,
                                double t_width, const std::vector<double>& x_center,
                                const std::vector<double>& x_width,
                                Charge q = Charge::uncharged) {
  if (comp < 0 || comp >= g.fiber) throw ConfigError("funcalg: bump component out of range");
  if (int(x_center.size()) != g.dim - 1 || int(x_width.size()) != g.dim - 1)
    throw ShapeError("funcalg: bump needs one center and width per spatial axis");
  const auto moll = [](double s) {
    const double s2 = s * s;
    return s2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s2)) : 0.0;
  };
  DoubledSection m(g, q);
  for (int t = 0; t < g.nt; ++t) {
    const double wt = moll((t - t_center) / t_width);
    if (wt == 0.0) continue;
    for (long xf = 0; xf < g.nspace(); ++xf) {
      const std::vector<int> x = g.xcoords(xf);
      double w = wt;
      for (int i = 0; i < g.dim - 1 && w != 0.0; ++i)
        w *= moll((double(x[std::size_t(i)]) - x_center[std::size_t(i)]) /
                  x_width[std::size_t(i)]);
      if (w == 0.0) continue;
      m.sp.at(t, xf, comp) = cplx(w, 0.0);
      m.co.at(t, xf, comp) = cplx(w, 0.0);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// constructors for functionals

inline FermionicFunctional zero_functional(const ModeBasis& b, Charge q) {
  FermionicFunctional f;
  f.charge = q;
  f.basis_id = b.id;
  f.nmodes = b.nmodes;
  f.p_max = b.p_max;
  return f;
}

inline FermionicFunctional unit_functional(const ModeBasis& b, Charge q) {
  FermionicFunctional f = zero_functional(b, q);
  f.set_term(0, cplx(1.0, 0.0));
  return f;
}

// basis monomial coeff * e_{i1} ^ ... ^ e_{ip}; repeated indices make it zero
inline FermionicFunctional monomial(const ModeBasis& b, Charge q, std::vector<int> idx,
                                    cplx coeff) {
  FermionicFunctional f = zero_functional(b, q);
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  std::uint64_t mask = 0;
  for (int k : idx) {
    if (k < 0 || k >= b.nmodes) throw ConfigError("funcalg: monomial index out of range");
    const std::uint64_t bit = std::uint64_t(1) << k;
    if (mask & bit) return f;
    mask |= bit;
  }
  f.set_term(mask, double(sign) * coeff);
  return f;
}

// ---------------------------------------------------------------------------
// evaluation

// Alternating determinant of coordinate columns restricted to the rows of
// mask. The columns are first brought to a canonical lexicographic order
// with the permutation parity tracked, so permuting arguments flips only
// the sign bit and two equal columns give an exact zero.
inline cplx alternating_det(const std::vector<VecC>& cols, std::uint64_t mask) {
  const int p = std::popcount(mask);
  if (int(cols.size()) != p) throw ShapeError("funcalg: column count does not match degree");
  if (p == 0) return cplx(1.0, 0.0);
  const std::vector<int> rows = detail::mask_bits(mask);
  const std::size_t np = std::size_t(p);
  std::vector<std::vector<cplx>> rc(np, std::vector<cplx>(np));
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < p; ++r)
      rc[std::size_t(c)][std::size_t(r)] = cols[std::size_t(c)](rows[std::size_t(r)]);
  std::vector<int> perm(np);
  for (int c = 0; c < p; ++c) perm[std::size_t(c)] = c;
  const auto less = [&](int a, int bb) {
    const auto& u = rc[std::size_t(a)];
    const auto& v = rc[std::size_t(bb)];
    for (int r = 0; r < p; ++r) {
      if (u[std::size_t(r)].real() != v[std::size_t(r)].real())
        return u[std::size_t(r)].real() < v[std::size_t(r)].real();
      if (u[std::size_t(r)].imag() != v[std::size_t(r)].imag())
        return u[std::size_t(r)].imag() < v[std::size_t(r)].imag();
    }
    return false;
  };
  std::sort(perm.begin(), perm.end(), less);
  int inv = 0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (perm[std::size_t(i)] > perm[std::size_t(j)]) ++inv;
  for (int c = 0; c + 1 < p; ++c) {
    bool equal = true;
    for (int r = 0; r < p && equal; ++r)
      equal = rc[std::size_t(perm[std::size_t(c)])][std::size_t(r)] ==
              rc[std::size_t(perm[std::size_t(c + 1)])][std::size_t(r)];
    if (equal) return cplx(0.0, 0.0);
  }
  MatC m(p, p);
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < p; ++r) m(r, c) = rc[std::size_t(perm[std::size_t(c)])][std::size_t(r)];
  const cplx det = m.determinant();
  return (inv & 1) ? -det : det;
}

// evaluation on coordinate columns; only terms of matching degree contribute
inline cplx evaluate(const FermionicFunctional& f, const std::vector<VecC>& cols) {
  const int p = int(cols.size());
  for (const auto& c : cols)
    if (int(c.size()) != f.nmodes) throw ShapeError("funcalg: coordinate size mismatch");
  cplx acc(0.0, 0.0);
  for (const auto& [mask, v] : f.terms)
    if (std::popcount(mask) == p) acc += v * alternating_det(cols, mask);
  return acc;
}

// evaluation on sections; each argument is coordinated through the gram
// form, so components outside the span are invisible to the functional
inline cplx evaluate(const FermionicFunctional& f, const std::vector<DoubledSection>& args,
                     const ModeBasis& basis) {
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functional belongs to a different mode basis");
  std::vector<VecC> cols;
  cols.reserve(args.size());
  for (const auto& u : args) {
    if (u.sp.charge != f.charge)
      throw BundleError("funcalg: argument bundle does not match the functional");
    cols.push_back(basis.coordinates(u));
  }
  return evaluate(f, cols);
}

// ---------------------------------------------------------------------------
// derivative

// left derivative in coordinate direction c: (d_c f)(u) = f(c ^ u)
inline FermionicFunctional derivative(const FermionicFunctional& f, const VecC& c) {
  if (int(c.size()) != f.nmodes) throw ShapeError("funcalg: coordinate size mismatch");
  FermionicFunctional out = f;
  out.terms.clear();
  for (const auto& [mask, v] : f.terms) {
    std::uint64_t rest = mask;
    while (rest) {
      const int j = std::countr_zero(rest);
      rest &= rest - 1;
      const cplx cj = c(j);
      if (cj == cplx(0.0, 0.0)) continue;
      const double s = detail::strip_sign_left(mask, j);
      out.add_term(mask & ~(std::uint64_t(1) << j), s * cj * v);
    }
  }
  return out;
}

inline FermionicFunctional derivative(const FermionicFunctional& f, const DoubledSection& h,
                                      const ModeBasis& basis) {
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functional belongs to a different mode basis");
  if (h.sp.charge != f.charge)
    throw BundleError("funcalg: derivative direction bundle does not match the functional");
  return derivative(f, basis.coordinates(h));
}

// ---------------------------------------------------------------------------
// wedge

inline FermionicFunctional wedge(const FermionicFunctional& f, const FermionicFunctional& g) {
  f.require_compatible(g);
  FermionicFunctional out = f;
  out.terms.clear();
  for (const auto& [mi, vi] : f.terms)
    for (const auto& [mj, vj] : g.terms) {
      if (mi & mj) continue;
      if (std::popcount(mi | mj) > f.p_max)
        throw TruncationError("funcalg: wedge degree exceeds the truncation order");
      out.add_term(mi | mj, double(detail::merge_sign(mi, mj)) * vi * vj);
    }
  return out;
}

// ---------------------------------------------------------------------------
// contraction products

namespace detail {

using TensorTerms = std::map<std::pair<std::uint64_t, std::uint64_t>, cplx>;

// one insertion: right derivative on the first leg, left on the second,
// contracted through the matrix B in mode coordinates
inline TensorTerms insertion_step(const TensorTerms& cur, const MatC& B) {
  TensorTerms next;
  for (const auto& [key, v] : cur) {
    const auto [mi, mj] = key;
    std::uint64_t ri = mi;
    while (ri) {
      const int i = std::countr_zero(ri);
      ri &= ri - 1;
      const double si = strip_sign_right(mi, i);
      std::uint64_t rj = mj;
      while (rj) {
        const int j = std::countr_zero(rj);
        rj &= rj - 1;
        const cplx bij = B(i, j);
        if (bij == cplx(0.0, 0.0)) continue;
        const double sj = strip_sign_left(mj, j);
        const cplx w = v * bij * (si * sj);
        if (w == cplx(0.0, 0.0)) continue;
        const auto nk = std::make_pair(mi & ~(std::uint64_t(1) << i),
                                       mj & ~(std::uint64_t(1) << j));
        auto it = next.find(nk);
        if (it == next.end())
          next.emplace(nk, w);
        else {
          it->second += w;
          if (it->second == cplx(0.0, 0.0)) next.erase(it);
        }
      }
    }
  }
  return next;
}

// multiply the two legs back together with the merge sign
inline FermionicFunctional fuse(const TensorTerms& cur, const FermionicFunctional& tags,
                                double scale) {
  FermionicFunctional out = tags;
  out.terms.clear();
  for (const auto& [key, v] : cur) {
    const auto [mi, mj] = key;
    if (mi & mj) continue;
    if (std::popcount(mi | mj) > out.p_max)
      throw TruncationError("funcalg: product degree exceeds the truncation order");
    out.add_term(mi | mj, scale * double(merge_sign(mi, mj)) * v);
  }
  return out;
}

}  // namespace detail

// Peierls bracket: a single contraction of first derivatives through the
// causal kernel in coordinates, H^{-1} S H^{-1}. The matrix is symmetric,
// which makes the bracket graded anticommutative.
inline FermionicFunctional peierls(const FermionicFunctional& f, const FermionicFunctional& g,
                                   const ModeBasis& basis) {
  f.require_compatible(g);
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functionals belong to a different mode basis");
  const MatC& s = f.charge == Charge::charged ? basis.s_coupled : basis.s_free;
  const MatC stilde = basis.gram_inv * s * basis.gram_inv;
  detail::TensorTerms cur;
  for (const auto& [mi, vi] : f.terms)
    for (const auto& [mj, vj] : g.terms) cur[{mi, mj}] = vi * vj;
  return detail::fuse(detail::insertion_step(cur, stilde), f, 1.0);
}

// insertion matrix of a state in this basis, (H^{-1} Omega H^{-1})^T
inline MatC star_insertion_matrix(const ModeBasis& basis, const TwoPointState& state) {
  MatC om;
  if (state.state_id == basis.omega_state_id)
    om = basis.omega;
  else if (state.state_id == basis.omega_g_state_id)
    om = basis.omega_g;
  else {
    if (!state.grid.same_shape(basis.grid)) throw ShapeError("funcalg: state grid mismatch");
    om = state_mode_kernel(state, basis.rep, basis.family(state.charge));
  }
  return (basis.gram_inv * om * basis.gram_inv).transpose();
}

// Star product as a formal hbar series. Order 0 is the wedge product by
// construction; order n contracts n derivative pairs through the state's
// insertion matrix with a 1/n! from the repeated insertions.
inline HbarSeries star(const FermionicFunctional& f, const FermionicFunctional& g,
                       const ModeBasis& basis, const TwoPointState& state) {
  f.require_compatible(g);
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functionals belong to a different mode basis");
  if (state.charge != f.charge)
    throw BundleError("funcalg: state bundle does not match the functionals");
  const MatC B = star_insertion_matrix(basis, state);
  HbarSeries out;
  out.orders.push_back(wedge(f, g));
  detail::TensorTerms cur;
  for (const auto& [mi, vi] : f.terms)
    for (const auto& [mj, vj] : g.terms) cur[{mi, mj}] = vi * vj;
  double kfact = 1.0;
  for (int k = 1; k <= basis.p_max && !cur.empty(); ++k) {
    cur = detail::insertion_step(cur, B);
    if (cur.empty()) break;
    kfact *= double(k);
    out.orders.push_back(detail::fuse(cur, f, 1.0 / kfact));
  }
  return out;
}

// star product of formal series, truncated at hbar^p_max
inline HbarSeries star(const HbarSeries& a, const HbarSeries& b, const ModeBasis& basis,
                       const TwoPointState& state) {
  if (a.orders.empty() || b.orders.empty())
    throw ConfigError("funcalg: series has no terms to take tags from");
  HbarSeries out;
  out.orders.push_back(zero_functional(basis, a.orders.front().charge));
  const int cap = basis.p_max;
  for (int i = 0; i <= a.max_order() && i <= cap; ++i)
    for (int j = 0; j <= b.max_order() && i + j <= cap; ++j) {
      if (a.orders[std::size_t(i)].is_zero() || b.orders[std::size_t(j)].is_zero()) continue;
      const HbarSeries t =
          star(a.orders[std::size_t(i)], b.orders[std::size_t(j)], basis, state);
      for (int k = 0; k <= t.max_order() && i + j + k <= cap; ++k) {
        const int n = i + j + k;
        while (out.max_order() < n)
          out.orders.push_back(zero_functional(basis, a.orders.front().charge));
        out.orders[std::size_t(n)] += t.orders[std::size_t(k)];
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// involution

// (F*)_p(u_p) = conj(F_p(u_p*)) with the monomial involution reversing the
// legs and conjugating each one. On a self-conjugate family this reduces to
// conjugating coefficients with the reversal parity of each index set.
inline FermionicFunctional functional_involution(const FermionicFunctional& f,
                                                 const ModeBasis& basis) {
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functional belongs to a different mode basis");
  if (!basis.self_conjugate)
    throw DomainError("funcalg: involution needs a self-conjugate mode family");
  FermionicFunctional out = f;
  out.terms.clear();
  for (const auto& [mask, v] : f.terms) {
    const int p = std::popcount(mask);
    const bool flip = ((p * (p - 1) / 2) & 1) != 0;
    out.set_term(mask, flip ? -std::conj(v) : std::conj(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// algebra-level Moller maps

namespace detail {

// pullback of a functional along a coordinate map: (t F)_J = sum_I
// det(R[I, J]) F_I over index sets of equal size, the compound-matrix action
inline FermionicFunctional minor_pullback(const FermionicFunctional& f, const MatC& r,
                                          int nmodes, Charge out_charge) {
  FermionicFunctional out = f;
  out.charge = out_charge;
  out.terms.clear();
  std::map<int, std::vector<std::pair<std::vector<int>, cplx>>> by_degree;
  for (const auto& [mask, v] : f.terms)
    by_degree[std::popcount(mask)].push_back({mask_bits(mask), v});
  for (const auto& [p, src] : by_degree) {
    if (p == 0) {
      for (const auto& [rows, v] : src) out.add_term(0, v);
      continue;
    }
    for_each_index_subset(nmodes, p, [&](std::uint64_t jmask) {
      const std::vector<int> cols = mask_bits(jmask);
      cplx acc(0.0, 0.0);
      MatC sub(p, p);
      for (const auto& [rows, v] : src) {
        for (int a = 0; a < p; ++a)
          for (int c = 0; c < p; ++c)
            sub(a, c) = r(rows[std::size_t(a)], cols[std::size_t(c)]);
        acc += v * sub.determinant();
      }
      if (acc != cplx(0.0, 0.0)) out.add_term(jmask, acc);
    });
  }
  return out;
}

}  // namespace detail

// Push a charged functional to the uncharged algebra by precomposing every
// argument with the interacting Moller map. With empty coupling support the
// map is a retag and the components pass through bitwise.
inline FermionicFunctional algebra_moller(const FermionicFunctional& f, const ModeBasis& basis) {
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functional belongs to a different mode basis");
  if (f.charge != Charge::charged)
    throw BundleError("funcalg: algebra Moller map expects a charged functional");
  if (basis.moller_trivial) {
    FermionicFunctional out = f;
    out.charge = Charge::uncharged;
    return out;
  }
  return detail::minor_pullback(f, basis.r_mode, basis.nmodes, Charge::uncharged);
}

// inverse direction, precomposition with the inverse Moller map
inline FermionicFunctional algebra_moller_inverse(const FermionicFunctional& f,
                                                  const ModeBasis& basis) {
  if (f.basis_id != basis.id)
    throw ConfigError("funcalg: functional belongs to a different mode basis");
  if (f.charge != Charge::uncharged)
    throw BundleError("funcalg: inverse algebra Moller map expects an uncharged functional");
  if (basis.moller_trivial) {
    FermionicFunctional out = f;
    out.charge = Charge::charged;
    return out;
  }
  return detail::minor_pullback(f, basis.r_hat_mode, basis.nmodes, Charge::charged);
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json functional_to_json(const FermionicFunctional& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [mask, v] : f.terms) {
    nlohmann::json idx = nlohmann::json::array();
    for (int k : detail::mask_bits(mask)) idx.push_back(k);
    terms.push_back({{"index", idx}, {"re", v.real()}, {"im", v.imag()}});
  }
  return {{"schema_version", kSchemaVersion},
          {"bundle", f.charge == Charge::charged ? "charged" : "uncharged"},
          {"nmodes", f.nmodes},
          {"p_max", f.p_max},
          {"terms", terms}};
}

inline FermionicFunctional functional_from_json(const nlohmann::json& j, const ModeBasis& basis) {
  FermionicFunctional f;
  const std::string bundle = j.at("bundle").get<std::string>();
  if (bundle != "charged" && bundle != "uncharged")
    throw ConfigError("funcalg: unknown bundle tag in serialized functional");
  f.charge = bundle == "charged" ? Charge::charged : Charge::uncharged;
  f.nmodes = j.at("nmodes").get<int>();
  f.p_max = j.at("p_max").get<int>();
  if (f.nmodes != basis.nmodes || f.p_max != basis.p_max)
    throw ConfigError("funcalg: serialized functional does not fit the mode basis");
  f.basis_id = basis.id;
  for (const auto& t : j.at("terms")) {
    std::uint64_t mask = 0;
    int prev = -1;
    for (const auto& e : t.at("index")) {
      const int k = e.get<int>();
      if (k <= prev) throw ConfigError("funcalg: serialized index sets must ascend");
      if (k >= f.nmodes) throw ConfigError("funcalg: serialized index out of range");
      mask |= std::uint64_t(1) << k;
      prev = k;
    }
    f.set_term(mask, cplx(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  return f;
}

inline nlohmann::json series_to_json(const HbarSeries& s) {
  nlohmann::json orders = nlohmann::json::array();
  for (const auto& f : s.orders) orders.push_back(functional_to_json(f));
  return {{"schema_version", kSchemaVersion}, {"orders", orders}};
}

inline HbarSeries series_from_json(const nlohmann::json& j, const ModeBasis& basis) {
  HbarSeries s;
  for (const auto& o : j.at("orders")) s.orders.push_back(functional_from_json(o, basis));
  return s;
}

}  // namespace slab
