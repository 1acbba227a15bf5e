#pragma once

// Sections of the spinor and cospinor bundles over the slab, their doubled
// combination, bilinear pairings against the spinor metric h, and the
// discrete integrals and Sobolev-style seminorms built from them.

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/grid.hpp"

namespace slab {

enum class Charge { charged, uncharged };
enum class Leg { spinor, cospinor };

inline const char* to_string(Charge c) {
  return c == Charge::charged ? "charged" : "uncharged";
}
inline const char* to_string(Leg l) { return l == Leg::spinor ? "spinor" : "cospinor"; }

struct SpinorSection {
  SpacetimeGrid grid;
  Charge charge = Charge::uncharged;
  Leg leg = Leg::spinor;
  std::vector<cplx> data;  // ((t*nspace + xflat)*fiber + comp)

  SpinorSection() = default;
  SpinorSection(const SpacetimeGrid& g, Charge q = Charge::uncharged,
                Leg l = Leg::spinor)
      : grid(g), charge(q), leg(l), data(std::size_t(g.nvals()), cplx(0.0, 0.0)) {}

  cplx& at(int t, long xf, int c) { return data[std::size_t(grid.val_index(t, xf, c))]; }
  const cplx& at(int t, long xf, int c) const {
    return data[std::size_t(grid.val_index(t, xf, c))];
  }

  SpinorSection& operator+=(const SpinorSection& o) {
    require_same(o);
    for (std::size_t k = 0; k < data.size(); ++k) data[k] += o.data[k];
    return *this;
  }
  SpinorSection& operator-=(const SpinorSection& o) {
    require_same(o);
    for (std::size_t k = 0; k < data.size(); ++k) data[k] -= o.data[k];
    return *this;
  }
  SpinorSection& operator*=(cplx z) {
    for (auto& v : data) v *= z;
    return *this;
  }
  friend SpinorSection operator+(SpinorSection a, const SpinorSection& b) {
    return a += b;
  }
  friend SpinorSection operator-(SpinorSection a, const SpinorSection& b) {
    return a -= b;
  }
  friend SpinorSection operator*(cplx z, SpinorSection a) { return a *= z; }

  void require_same(const SpinorSection& o) const {
    if (!grid.same_shape(o.grid)) throw ShapeError("section: grid mismatch");
    if (leg != o.leg) throw BundleError("section: spinor/cospinor mismatch");
    if (charge != o.charge) throw BundleError("section: charge mismatch");
  }

  double norm() const { return l2_norm(data); }

  Region support(double eps = 0.0) const {
    Region r(grid);
    for (int t = 0; t < grid.nt; ++t)
      for (long xf = 0; xf < grid.nspace(); ++xf)
        for (int c = 0; c < grid.fiber; ++c)
          if (std::abs(at(t, xf, c)) > eps) {
            r.set(grid.site(t, xf));
            break;
          }
    return r;
  }

  bool zero_on(const Region& away) const {
    for (int t = 0; t < grid.nt; ++t)
      for (long xf = 0; xf < grid.nspace(); ++xf)
        if (away.at(grid.site(t, xf)))
          for (int c = 0; c < grid.fiber; ++c)
            if (at(t, xf, c) != cplx(0.0, 0.0)) return false;
    return true;
  }
};

inline SpinorSection random_section(const SpacetimeGrid& g, Rng& rng,
                                    Charge q = Charge::uncharged,
                                    Leg l = Leg::spinor) {
  SpinorSection s(g, q, l);
  for (auto& v : s.data) v = rng.cgauss();
  return s;
}

inline SpinorSection masked(const SpinorSection& s, const Region& r) {
  SpinorSection out = s;
  for (int t = 0; t < s.grid.nt; ++t)
    for (long xf = 0; xf < s.grid.nspace(); ++xf)
      if (!r.at(s.grid.site(t, xf)))
        for (int c = 0; c < s.grid.fiber; ++c) out.at(t, xf, c) = cplx(0.0, 0.0);
  return out;
}

// Volume integral of a pointwise scalar field given as samples.
inline cplx integrate(const SpacetimeGrid& g, const std::vector<cplx>& density) {
  if (long(density.size()) != g.nsites()) throw ShapeError("integrate: density size");
  cplx acc(0.0, 0.0);
  for (const auto& v : density) acc += v;
  return acc * g.weight();
}

// Bilinear spinor-cospinor pairing B(s, c) = sum_x wt * s(x)^T h c(x).
// No complex conjugation: duality is carried by the cospinor's storage.
// Mixing charged with uncharged sections is a category error, not a cast.
inline cplx pairing(const CliffordRep& rep, const SpinorSection& s,
                    const SpinorSection& c) {
  if (!s.grid.same_shape(c.grid)) throw ShapeError("pairing: grid mismatch");
  if (s.leg != Leg::spinor || c.leg != Leg::cospinor)
    throw BundleError("pairing: expects (spinor, cospinor)");
  if (s.charge != c.charge) throw BundleError("pairing: charge mismatch");
  const int f = s.grid.fiber;
  if (rep.fiber != f) throw ShapeError("pairing: rep fiber mismatch");
  cplx acc(0.0, 0.0);
  for (long site = 0; site < s.grid.nsites(); ++site)
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b)
        acc += s.data[std::size_t(site * f + a)] * rep.h(a, b) *
               c.data[std::size_t(site * f + b)];
  return acc * s.grid.weight();
}

// Hermitian pairing <s, w> = sum_x wt * s(x)^dagger h w(x) on a single leg.
inline cplx hermitian_pairing(const CliffordRep& rep, const SpinorSection& s,
                              const SpinorSection& w) {
  if (!s.grid.same_shape(w.grid)) throw ShapeError("pairing: grid mismatch");
  if (s.leg != w.leg) throw BundleError("pairing: leg mismatch");
  if (s.charge != w.charge) throw BundleError("pairing: charge mismatch");
  const int f = s.grid.fiber;
  cplx acc(0.0, 0.0);
  for (long site = 0; site < s.grid.nsites(); ++site)
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b)
        acc += std::conj(s.data[std::size_t(site * f + a)]) * rep.h(a, b) *
               w.data[std::size_t(site * f + b)];
  return acc * s.grid.weight();
}

// Doubled field: a spinor component paired with an independent cospinor one.
struct DoubledSection {
  SpinorSection sp;  // leg = spinor
  SpinorSection co;  // leg = cospinor

  DoubledSection() = default;
  DoubledSection(const SpacetimeGrid& g, Charge q = Charge::uncharged)
      : sp(g, q, Leg::spinor), co(g, q, Leg::cospinor) {}
  DoubledSection(SpinorSection s, SpinorSection c) : sp(std::move(s)), co(std::move(c)) {
    if (!sp.grid.same_shape(co.grid)) throw ShapeError("doubled: grid mismatch");
    if (sp.leg != Leg::spinor || co.leg != Leg::cospinor)
      throw BundleError("doubled: legs must be (spinor, cospinor)");
  }

  const SpacetimeGrid& grid() const { return sp.grid; }

  DoubledSection& operator+=(const DoubledSection& o) {
    sp += o.sp;
    co += o.co;
    return *this;
  }
  DoubledSection& operator-=(const DoubledSection& o) {
    sp -= o.sp;
    co -= o.co;
    return *this;
  }
  DoubledSection& operator*=(cplx z) {
    sp *= z;
    co *= z;
    return *this;
  }
  friend DoubledSection operator+(DoubledSection a, const DoubledSection& b) {
    return a += b;
  }
  friend DoubledSection operator-(DoubledSection a, const DoubledSection& b) {
    return a -= b;
  }
  double norm() const { return std::hypot(sp.norm(), co.norm()); }
};

// Antilinear involution exchanging the legs: (u*)_sp = conj(u_co) and
// (u*)_co = conj(u_sp), with the charge conjugated implicitly.
inline DoubledSection involution(const DoubledSection& u) {
  DoubledSection out(u.grid(), u.sp.charge);
  for (std::size_t k = 0; k < u.sp.data.size(); ++k) {
    out.sp.data[k] = std::conj(u.co.data[k]);
    out.co.data[k] = std::conj(u.sp.data[k]);
  }
  return out;
}

// Pointwise doubled pairing: the scalar field (u,v)(x) = (v1,u2)(x) + (u1,v2)(x)
// with each term contracted through h. Symmetric in u, v sitewise.
inline std::vector<cplx> doubled_pairing(const CliffordRep& rep, const DoubledSection& u,
                                         const DoubledSection& v) {
  if (!u.grid().same_shape(v.grid())) throw ShapeError("doubled_pairing: grid mismatch");
  if (u.sp.charge != v.sp.charge) throw BundleError("doubled_pairing: charge mismatch");
  const int f = u.grid().fiber;
  std::vector<cplx> field(std::size_t(u.grid().nsites()), cplx(0.0, 0.0));
  for (long site = 0; site < u.grid().nsites(); ++site) {
    cplx acc(0.0, 0.0);
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b)
        acc += v.sp.data[std::size_t(site * f + a)] * rep.h(a, b) *
                   u.co.data[std::size_t(site * f + b)] +
               u.sp.data[std::size_t(site * f + a)] * rep.h(a, b) *
                   v.co.data[std::size_t(site * f + b)];
    field[std::size_t(site)] = acc;
  }
  return field;
}

// Global symmetric form <u, v> = integrate(doubled_pairing(u, v)); equals
// B(v_sp, u_co) + B(u_sp, v_co). This is the inner structure every adjoint
// and every dual operator in the library is taken with respect to.
inline cplx global_pairing(const CliffordRep& rep, const DoubledSection& u,
                           const DoubledSection& v) {
  return integrate(u.grid(), doubled_pairing(rep, u, v));
}

inline DoubledSection random_doubled(const SpacetimeGrid& g, Rng& rng,
                                     Charge q = Charge::uncharged) {
  DoubledSection u(g, q);
  for (auto& v : u.sp.data) v = rng.cgauss();
  for (auto& v : u.co.data) v = rng.cgauss();
  return u;
}

// ---------------------------------------------------------------------------
// plain-text and binary serialization

inline void save_csv(const SpinorSection& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("save_csv: cannot open " + path);
  f << "t";
  for (std::size_t i = 0; i < s.grid.nx.size(); ++i) f << ",x" << i;
  for (int c = 0; c < s.grid.fiber; ++c) f << ",re" << c << ",im" << c;
  f << "\n";
  f.precision(17);
  for (int t = 0; t < s.grid.nt; ++t)
    for (long xf = 0; xf < s.grid.nspace(); ++xf) {
      f << t;
      for (int xi : s.grid.xcoords(xf)) f << "," << xi;
      for (int c = 0; c < s.grid.fiber; ++c) {
        const cplx v = s.at(t, xf, c);
        f << "," << v.real() << "," << v.imag();
      }
      f << "\n";
    }
}

namespace detail {

inline void put_u64(std::ostream& f, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
  f.write(b, 8);
}
inline std::uint64_t get_u64(std::istream& f) {
  unsigned char b[8];
  f.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}
inline void put_f64(std::ostream& f, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(f, v);
}
inline double get_f64(std::istream& f) {
  std::uint64_t v = get_u64(f);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace detail

// Binary section dump, little-endian, magic "SLABSEC1".
inline void save_binary(const SpinorSection& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("save_binary: cannot open " + path);
  f.write("SLABSEC1", 8);
  detail::put_u64(f, std::uint64_t(s.grid.dim));
  detail::put_u64(f, std::uint64_t(s.grid.nt));
  for (int n : s.grid.nx) detail::put_u64(f, std::uint64_t(n));
  detail::put_f64(f, s.grid.dt);
  detail::put_f64(f, s.grid.dx);
  detail::put_u64(f, s.grid.topo == Topology::periodic ? 0 : 1);
  detail::put_u64(f, s.charge == Charge::charged ? 1 : 0);
  detail::put_u64(f, s.leg == Leg::cospinor ? 1 : 0);
  for (const cplx& v : s.data) {
    detail::put_f64(f, v.real());
    detail::put_f64(f, v.imag());
  }
}

inline SpinorSection load_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("load_binary: cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (std::string(magic, 8) != "SLABSEC1")
    throw ConfigError("load_binary: bad magic in " + path);
  const int dim = int(detail::get_u64(f));
  const int nt = int(detail::get_u64(f));
  std::vector<int> nx;
  for (int i = 0; i < dim - 1; ++i) nx.push_back(int(detail::get_u64(f)));
  const double dt = detail::get_f64(f);
  const double dx = detail::get_f64(f);
  const Topology topo = detail::get_u64(f) == 0 ? Topology::periodic : Topology::bounded;
  const Charge q = detail::get_u64(f) == 1 ? Charge::charged : Charge::uncharged;
  const Leg l = detail::get_u64(f) == 1 ? Leg::cospinor : Leg::spinor;
  SpinorSection s(SpacetimeGrid(dim, nt, nx, dt, dx, topo), q, l);
  for (auto& v : s.data) {
    const double re = detail::get_f64(f);
    const double im = detail::get_f64(f);
    v = cplx(re, im);
  }
  if (!f) throw ConfigError("load_binary: truncated file " + path);
  return s;
}

}  // namespace slab
