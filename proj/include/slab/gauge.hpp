#pragma once

// External gauge background on the slab. The potential is anti-hermitian,
// A_mu = i a_mu with a_mu real, stored componentwise per site. Its pointwise
// action on spinors is s(x) -> i gamma(A(x)) s(x); on cospinors the complex
// conjugate matrix acts. Both vanish off the potential's support.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/fields.hpp"
#include "slab/grid.hpp"

namespace slab {

// Strictness ladder for causal-support validation: `enforce` runs every
// check, `allow_wraparound` keeps structural source preconditions but skips
// cone-containment tests, `off` silences source validation entirely (used by
// internal identity batteries that feed arbitrary sections).
enum class ConeCheck { enforce, allow_wraparound, off };

// Minimal circular interval width covering the occupied coordinates of a
// region in spatial direction i (number of cells spanned minus one).
inline int circular_width(const Region& r, int i) {
  const SpacetimeGrid& g = r.grid;
  const int n = g.nx[std::size_t(i)];
  std::vector<char> occ(std::size_t(n), 0);
  for (int t = 0; t < g.nt; ++t)
    for (long xf = 0; xf < g.nspace(); ++xf)
      if (r.at(g.site(t, xf))) occ[std::size_t(g.xcoords(xf)[std::size_t(i)])] = 1;
  int total = 0;
  for (char c : occ) total += c;
  if (total == 0) return -1;  // empty
  if (g.topo == Topology::bounded) {
    int lo = n, hi = -1;
    for (int x = 0; x < n; ++x)
      if (occ[std::size_t(x)]) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    return hi - lo;
  }
  int best_gap = -1;
  for (int start = 0; start < n; ++start) {
    if (occ[std::size_t(start)]) continue;
    int len = 0;
    while (len < n && !occ[std::size_t((start + len) % n)]) ++len;
    best_gap = std::max(best_gap, len);
  }
  if (best_gap < 0) return n - 1;  // every cell occupied
  return n - best_gap - 1;
}

// True when the forward lightcone of the region stays clear of wrapping
// into itself before the last slice: width + 2*(nt-1-t_min) <= n-1 per
// spatial direction.
inline bool forward_cone_fits(const Region& r) {
  const auto [t_min, t_max] = r.time_extent();
  (void)t_max;
  if (t_min < 0) return true;
  const SpacetimeGrid& g = r.grid;
  if (g.topo == Topology::bounded) return true;
  for (std::size_t i = 0; i + 1 < std::size_t(g.dim); ++i) {
    const int w = circular_width(r, int(i));
    if (w + 2 * (g.nt - 1 - t_min) > g.nx[i] - 1) return false;
  }
  return true;
}

inline bool backward_cone_fits(const Region& r) { return forward_cone_fits(time_mirror(r)); }

struct GaugePotential {
  SpacetimeGrid grid;
  std::vector<double> a;        // (site*dim + mu), real; the potential is i*a
  Region supp;                  // sites where some component is nonzero
  std::vector<long> supp_list;  // flat site indices of supp, ascending

  GaugePotential() = default;
  GaugePotential(const SpacetimeGrid& g, std::vector<double> a_,
                 ConeCheck check = ConeCheck::enforce)
      : grid(g), a(std::move(a_)) {
    if (long(a.size()) != g.nsites() * g.dim)
      throw ShapeError("gauge: component array size mismatch");
    supp = Region(grid);
    for (long s = 0; s < grid.nsites(); ++s)
      for (int mu = 0; mu < grid.dim; ++mu)
        if (a[std::size_t(s * grid.dim + mu)] != 0.0) {
          supp.set(s);
          supp_list.push_back(s);
          break;
        }
    if (!supp_list.empty()) {
      const auto [t_min, t_max] = supp.time_extent();
      if (t_min < 1 || t_max > grid.nt - 2)
        throw DomainError("gauge: support must stay strictly inside the time slab");
    }
    if (check == ConeCheck::enforce && !forward_cone_fits(supp))
      throw DomainError(
          "gauge: support's forward lightcone wraps around the torus; "
          "shrink the support or pass allow_wraparound");
  }

  bool is_zero() const { return supp_list.empty(); }
  double comp(long site, int mu) const { return a[std::size_t(site * grid.dim + mu)]; }

  // pointwise action matrix  -sum_mu a_mu eta^{mu mu} gamma^mu
  MatC site_matrix(const CliffordRep& rep, long site) const {
    MatC m = MatC::Zero(rep.fiber, rep.fiber);
    for (int mu = 0; mu < grid.dim; ++mu) {
      const double c = comp(site, mu);
      if (c != 0.0) m -= c * rep.eta[std::size_t(mu)] * rep.gamma[std::size_t(mu)];
    }
    return m;
  }
};

// Smooth compactly supported bump profile: each component is
// amp_mu * exp(-r^2/(1-r^2)) inside the ellipsoid r < 1 and zero outside,
// with r^2 = ((t-tc)/ht)^2 + sum_i ((x_i-xc_i)/hx)^2 in physical units.
inline GaugePotential bump_potential(const SpacetimeGrid& g,
                                     const std::vector<double>& amp, double tc,
                                     const std::vector<double>& xc, double ht, double hx,
                                     ConeCheck check = ConeCheck::enforce) {
  if (int(amp.size()) != g.dim) throw ShapeError("gauge: need dim amplitudes");
  if (int(xc.size()) != g.dim - 1) throw ShapeError("gauge: need dim-1 centers");
  std::vector<double> a(std::size_t(g.nsites() * g.dim), 0.0);
  for (int t = 0; t < g.nt; ++t)
    for (long xf = 0; xf < g.nspace(); ++xf) {
      const double ut = (t * g.dt - tc) / ht;
      double r2 = ut * ut;
      const auto c = g.xcoords(xf);
      for (std::size_t i = 0; i < c.size(); ++i) {
        // nearest periodic image of the center
        double u = c[i] * g.dx - xc[i];
        if (g.topo == Topology::periodic) {
          const double L = g.nx[i] * g.dx;
          u -= L * std::round(u / L);
        }
        r2 += (u / hx) * (u / hx);
      }
      if (r2 >= 1.0) continue;
      const double f = std::exp(-r2 / (1.0 - r2));
      for (int mu = 0; mu < g.dim; ++mu)
        a[std::size_t((g.site(t, xf)) * g.dim + mu)] = amp[std::size_t(mu)] * f;
    }
  return GaugePotential(g, std::move(a), check);
}

inline GaugePotential box_potential(const SpacetimeGrid& g, const std::vector<double>& amp,
                                    int t0, int t1, const std::vector<int>& xlo,
                                    const std::vector<int>& xhi,
                                    ConeCheck check = ConeCheck::enforce) {
  if (int(amp.size()) != g.dim) throw ShapeError("gauge: need dim amplitudes");
  Region box = Region::box(g, t0, t1, xlo, xhi);
  std::vector<double> a(std::size_t(g.nsites() * g.dim), 0.0);
  for (long s = 0; s < g.nsites(); ++s)
    if (box.at(s))
      for (int mu = 0; mu < g.dim; ++mu)
        a[std::size_t(s * g.dim + mu)] = amp[std::size_t(mu)];
  return GaugePotential(g, std::move(a), check);
}

// CSV loader, columns: t, x0[, x1, x2], mu, re, im. The value is the
// potential component itself and must be purely imaginary; its imaginary
// part is the stored real coefficient. Missing sites stay zero.
inline GaugePotential load_potential_csv(const SpacetimeGrid& g, const std::string& path,
                                         ConeCheck check = ConeCheck::enforce) {
  std::ifstream f(path);
  if (!f) throw ConfigError("gauge: cannot open " + path);
  std::vector<double> a(std::size_t(g.nsites() * g.dim), 0.0);
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find("re") != std::string::npos) continue;  // header row
    }
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> cols;
    while (std::getline(ss, tok, ',')) cols.push_back(std::stod(tok));
    if (int(cols.size()) != g.dim + 3)
      throw ConfigError("gauge: bad column count in " + path);
    const int t = int(cols[0]);
    std::vector<int> xc(std::size_t(g.dim - 1));
    for (int i = 0; i < g.dim - 1; ++i) xc[std::size_t(i)] = int(cols[std::size_t(1 + i)]);
    const int mu = int(cols[std::size_t(g.dim)]);
    const double re = cols[std::size_t(g.dim + 1)];
    const double im = cols[std::size_t(g.dim + 2)];
    if (t < 0 || t >= g.nt || mu < 0 || mu >= g.dim)
      throw ConfigError("gauge: index out of range in " + path);
    for (int i = 0; i < g.dim - 1; ++i)
      if (xc[std::size_t(i)] < 0 || xc[std::size_t(i)] >= g.nx[std::size_t(i)])
        throw ConfigError("gauge: index out of range in " + path);
    if (re != 0.0)
      throw ConfigError("gauge: potential must be purely imaginary in " + path);
    a[std::size_t(g.site(t, g.xflat(xc)) * g.dim + mu)] = im;
  }
  return GaugePotential(g, std::move(a), check);
}

// Entwining maps between the uncharged and charged section spaces. In the
// preferred trivialization they copy component arrays verbatim and flip the
// tag; entwine_p(entwine_i(s)) = s bitwise.
inline SpinorSection entwine_i(const SpinorSection& s) {
  if (s.charge != Charge::uncharged) throw BundleError("entwine_i: already charged");
  SpinorSection out = s;
  out.charge = Charge::charged;
  return out;
}
inline SpinorSection entwine_p(const SpinorSection& s) {
  if (s.charge != Charge::charged) throw BundleError("entwine_p: already uncharged");
  SpinorSection out = s;
  out.charge = Charge::uncharged;
  return out;
}
inline DoubledSection entwine_i(const DoubledSection& u) {
  return DoubledSection(entwine_i(u.sp), entwine_i(u.co));
}
inline DoubledSection entwine_p(const DoubledSection& u) {
  return DoubledSection(entwine_p(u.sp), entwine_p(u.co));
}

// (A s)(x) = i gamma(A(x)) s(x) on the charged spinor leg; zero off the
// support.
inline SpinorSection apply_A(const CliffordRep& rep, const GaugePotential& pot,
                             const SpinorSection& s) {
  if (!pot.grid.same_shape(s.grid)) throw ShapeError("apply_A: grid mismatch");
  if (s.leg != Leg::spinor) throw BundleError("apply_A: expects the spinor leg");
  if (s.charge != Charge::charged) throw BundleError("apply_A: expects a charged section");
  SpinorSection out(s.grid, s.charge, s.leg);
  const int f = s.grid.fiber;
  VecC v(f), w(f);
  for (long site : pot.supp_list) {
    const MatC m = pot.site_matrix(rep, site);
    for (int c = 0; c < f; ++c) v(c) = s.data[std::size_t(site * f + c)];
    w = m * v;
    for (int c = 0; c < f; ++c) out.data[std::size_t(site * f + c)] = w(c);
  }
  return out;
}

// Cospinor-leg action: the conjugate matrix, equivalently h^{-1} A(x)^T h.
inline SpinorSection apply_Abar(const CliffordRep& rep, const GaugePotential& pot,
                                const SpinorSection& s) {
  if (!pot.grid.same_shape(s.grid)) throw ShapeError("apply_Abar: grid mismatch");
  if (s.leg != Leg::cospinor) throw BundleError("apply_Abar: expects the cospinor leg");
  if (s.charge != Charge::charged)
    throw BundleError("apply_Abar: expects a charged section");
  SpinorSection out(s.grid, s.charge, s.leg);
  const int f = s.grid.fiber;
  VecC v(f), w(f);
  for (long site : pot.supp_list) {
    const MatC m = pot.site_matrix(rep, site).conjugate();
    for (int c = 0; c < f; ++c) v(c) = s.data[std::size_t(site * f + c)];
    w = m * v;
    for (int c = 0; c < f; ++c) out.data[std::size_t(site * f + c)] = w(c);
  }
  return out;
}

// Real scalar gauge function sampled per site; the group element is e^{i a}.
struct GaugeFunction {
  SpacetimeGrid grid;
  std::vector<double> alpha;

  GaugeFunction() = default;
  explicit GaugeFunction(const SpacetimeGrid& g, double value = 0.0)
      : grid(g), alpha(std::size_t(g.nsites()), value) {}
  GaugeFunction(const SpacetimeGrid& g, std::vector<double> a)
      : grid(g), alpha(std::move(a)) {
    if (long(alpha.size()) != g.nsites()) throw ShapeError("gauge function: size");
    for (double v : alpha)
      if (!std::isfinite(v)) throw ConfigError("gauge function: non-finite sample");
  }
};

// Compactly supported smooth bump gauge function, same profile shape as
// bump_potential.
inline GaugeFunction bump_gauge_function(const SpacetimeGrid& g, double amp, double tc,
                                         const std::vector<double>& xc, double ht,
                                         double hx) {
  if (int(xc.size()) != g.dim - 1) throw ShapeError("gauge function: need dim-1 centers");
  std::vector<double> a(std::size_t(g.nsites()), 0.0);
  for (int t = 0; t < g.nt; ++t)
    for (long xf = 0; xf < g.nspace(); ++xf) {
      const double ut = (t * g.dt - tc) / ht;
      double r2 = ut * ut;
      const auto c = g.xcoords(xf);
      for (std::size_t i = 0; i < c.size(); ++i) {
        double u = c[i] * g.dx - xc[i];
        if (g.topo == Topology::periodic) {
          const double L = g.nx[i] * g.dx;
          u -= L * std::round(u / L);
        }
        r2 += (u / hx) * (u / hx);
      }
      if (r2 >= 1.0) continue;
      a[std::size_t(g.site(t, xf))] = amp * std::exp(-r2 / (1.0 - r2));
    }
  return GaugeFunction(g, std::move(a));
}

// The transformed potential has a' = a + d alpha with centered interior
// differences, one-sided at the time boundaries, periodic wrap in space.
inline GaugePotential gauge_transform(const GaugePotential& pot, const GaugeFunction& chi,
                                      ConeCheck check = ConeCheck::allow_wraparound) {
  const SpacetimeGrid& g = pot.grid;
  if (!chi.grid.same_shape(g)) throw ShapeError("gauge_transform: grid mismatch");
  const std::vector<double>& alpha = chi.alpha;
  std::vector<double> a2 = pot.a;
  for (int t = 0; t < g.nt; ++t)
    for (long xf = 0; xf < g.nspace(); ++xf) {
      const long s = g.site(t, xf);
      double dta;
      if (t == 0)
        dta = (alpha[std::size_t(g.site(1, xf))] - alpha[std::size_t(s)]) / g.dt;
      else if (t == g.nt - 1)
        dta = (alpha[std::size_t(s)] - alpha[std::size_t(g.site(t - 1, xf))]) / g.dt;
      else
        dta = (alpha[std::size_t(g.site(t + 1, xf))] -
               alpha[std::size_t(g.site(t - 1, xf))]) /
              (2.0 * g.dt);
      a2[std::size_t(s * g.dim + 0)] += dta;
      auto xc = g.xcoords(xf);
      for (int i = 0; i < g.dim - 1; ++i) {
        auto xp = xc, xm = xc;
        const int n = g.nx[std::size_t(i)];
        xp[std::size_t(i)] = (xc[std::size_t(i)] + 1) % n;
        xm[std::size_t(i)] = (xc[std::size_t(i)] + n - 1) % n;
        const double dxa = (alpha[std::size_t(g.site(t, g.xflat(xp)))] -
                            alpha[std::size_t(g.site(t, g.xflat(xm)))]) /
                           (2.0 * g.dx);
        a2[std::size_t(s * g.dim + 1 + i)] += dxa;
      }
    }
  return GaugePotential(g, std::move(a2), check);
}

// Pointwise phase e^{i sign alpha} on every component; the section transform
// that pairs with gauge_transform is sign = -1.
inline SpinorSection apply_phase(const SpinorSection& s, const GaugeFunction& chi,
                                 double sign) {
  if (!chi.grid.same_shape(s.grid)) throw ShapeError("apply_phase: grid mismatch");
  SpinorSection out = s;
  const int f = s.grid.fiber;
  for (long site = 0; site < s.grid.nsites(); ++site) {
    const cplx ph = std::exp(cplx(0.0, sign * chi.alpha[std::size_t(site)]));
    for (int c = 0; c < f; ++c) out.data[std::size_t(site * f + c)] *= ph;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sobolev-style seminorms with covariant differences.

namespace detail {

// One covariant difference in direction mu. Charged sections pick up the
// potential term +i a_mu on the spinor leg and -i a_mu on the cospinor leg.
inline SpinorSection cov_diff(const SpinorSection& s, int mu, const GaugePotential* pot) {
  const SpacetimeGrid& g = s.grid;
  SpinorSection out(g, s.charge, s.leg);
  const int f = g.fiber;
  for (int t = 0; t < g.nt; ++t)
    for (long xf = 0; xf < g.nspace(); ++xf)
      for (int c = 0; c < f; ++c) {
        cplx d;
        if (mu == 0) {
          if (t == 0)
            d = (s.at(1, xf, c) - s.at(0, xf, c)) / g.dt;
          else if (t == g.nt - 1)
            d = (s.at(t, xf, c) - s.at(t - 1, xf, c)) / g.dt;
          else
            d = (s.at(t + 1, xf, c) - s.at(t - 1, xf, c)) / (2.0 * g.dt);
        } else {
          const int i = mu - 1;
          auto xc = g.xcoords(xf);
          const int n = g.nx[std::size_t(i)];
          auto xp = xc, xm = xc;
          if (g.topo == Topology::periodic) {
            xp[std::size_t(i)] = (xc[std::size_t(i)] + 1) % n;
            xm[std::size_t(i)] = (xc[std::size_t(i)] + n - 1) % n;
            d = (s.at(t, g.xflat(xp), c) - s.at(t, g.xflat(xm), c)) / (2.0 * g.dx);
          } else {
            const int x = xc[std::size_t(i)];
            if (x == 0) {
              xp[std::size_t(i)] = 1;
              d = (s.at(t, g.xflat(xp), c) - s.at(t, xf, c)) / g.dx;
            } else if (x == n - 1) {
              xm[std::size_t(i)] = n - 2;
              d = (s.at(t, xf, c) - s.at(t, g.xflat(xm), c)) / g.dx;
            } else {
              xp[std::size_t(i)] = x + 1;
              xm[std::size_t(i)] = x - 1;
              d = (s.at(t, g.xflat(xp), c) - s.at(t, g.xflat(xm), c)) / (2.0 * g.dx);
            }
          }
        }
        if (pot && s.charge == Charge::charged) {
          const double sign = (s.leg == Leg::spinor) ? 1.0 : -1.0;
          d += cplx(0.0, sign * pot->comp(g.site(t, xf), mu)) * s.at(t, xf, c);
        }
        out.at(t, xf, c) = d;
      }
  return out;
}

}  // namespace detail

// Seminorm of order n: the max over multi-indices |alpha| <= n of the sup
// over sites (optionally restricted) of the fiber l2 norm of D^alpha u,
// differences applied direction by direction in ascending order.
inline double seminorm(const SpinorSection& s, int n, const GaugePotential* pot = nullptr,
                       const Region* where = nullptr) {
  if (n < 0) throw ConfigError("seminorm: negative order");
  if (s.grid.nt < n + 1)
    throw DomainError("seminorm: grid too short in time for the requested order");
  if (pot && !pot->grid.same_shape(s.grid)) throw ShapeError("seminorm: grid mismatch");
  const SpacetimeGrid& g = s.grid;
  const int d = g.dim;
  double best = 0.0;
  // enumerate multi-indices of total degree <= n
  std::vector<int> alpha(std::size_t(d), 0);
  std::function<void(int, int)> walk = [&](int mu, int left) {
    if (mu == d) {
      SpinorSection u = s;
      for (int m = 0; m < d; ++m)
        for (int k = 0; k < alpha[std::size_t(m)]; ++k) u = detail::cov_diff(u, m, pot);
      for (int t = 0; t < g.nt; ++t)
        for (long xf = 0; xf < g.nspace(); ++xf) {
          if (where && !where->at(g.site(t, xf))) continue;
          double f2 = 0.0;
          for (int c = 0; c < g.fiber; ++c) f2 += std::norm(u.at(t, xf, c));
          best = std::max(best, std::sqrt(f2));
        }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      alpha[std::size_t(mu)] = k;
      walk(mu + 1, left - k);
    }
    alpha[std::size_t(mu)] = 0;
  };
  walk(0, n);
  return best;
}

}  // namespace slab
