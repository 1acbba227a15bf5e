#pragma once

// Finite Lorentzian slab: nt time slices times a periodic (d-1)-dimensional
// spatial torus with uniform spacings. Exact discrete lightcones: a site
// (t', x') lies in the causal future of (t, x) iff t' >= t and the periodic
// offset satisfies |dx_i| <= t' - t in every spatial direction (unit cells
// per step, the cfl <= 1 regime).

#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "slab/common.hpp"

namespace slab {

enum class Topology { periodic, bounded };

struct SpacetimeGrid {
  int dim = 2;                // spacetime dimension, 2 or 4
  int nt = 0;                 // time slices
  std::vector<int> nx;        // spatial extents, dim-1 entries
  double dt = 0.0;
  double dx = 0.0;            // common spatial spacing
  Topology topo = Topology::periodic;
  int fiber = 2;

  SpacetimeGrid() = default;
  SpacetimeGrid(int dim_, int nt_, std::vector<int> nx_, double dt_, double dx_,
                Topology topo_ = Topology::periodic)
      : dim(dim_), nt(nt_), nx(std::move(nx_)), dt(dt_), dx(dx_), topo(topo_) {
    if (dim != 2 && dim != 4) throw ConfigError("grid: dim must be 2 or 4");
    if (int(nx.size()) != dim - 1) throw ConfigError("grid: need dim-1 spatial extents");
    if (nt < 2) throw ConfigError("grid: nt must be >= 2");
    for (int n : nx)
      if (n < 2) throw ConfigError("grid: spatial extents must be >= 2");
    if (!(dt > 0.0) || !(dx > 0.0)) throw ConfigError("grid: spacings must be positive");
    if (dt / dx > 1.0 + 1e-12) throw ConfigError("grid: cfl = dt/dx exceeds 1");
    fiber = (dim == 2) ? 2 : 4;
  }

  double cfl() const { return dt / dx; }
  long nspace() const {
    return std::accumulate(nx.begin(), nx.end(), 1L, std::multiplies<long>());
  }
  long nsites() const { return long(nt) * nspace(); }
  long nvals() const { return nsites() * fiber; }  // stored scalars per section
  double weight() const {
    double w = dt;
    for (std::size_t i = 0; i + 1 < std::size_t(dim); ++i) w *= dx;
    return w;
  }

  long xflat(const std::vector<int>& xc) const {
    long f = 0;
    for (std::size_t i = 0; i < nx.size(); ++i) f = f * nx[i] + xc[i];
    return f;
  }
  std::vector<int> xcoords(long xf) const {
    std::vector<int> c(nx.size());
    for (int i = int(nx.size()) - 1; i >= 0; --i) {
      c[std::size_t(i)] = int(xf % nx[std::size_t(i)]);
      xf /= nx[std::size_t(i)];
    }
    return c;
  }
  long site(int t, long xf) const { return long(t) * nspace() + xf; }
  long val_index(int t, long xf, int c) const { return site(t, xf) * fiber + c; }

  // periodic minimal absolute offset in direction i
  int perdist(int i, int a, int b) const {
    int n = nx[std::size_t(i)];
    int d = std::abs(a - b) % n;
    return (topo == Topology::periodic) ? std::min(d, n - d) : std::abs(a - b);
  }

  bool same_shape(const SpacetimeGrid& o) const {
    return dim == o.dim && nt == o.nt && nx == o.nx && dt == o.dt && dx == o.dx &&
           topo == o.topo;
  }
};

// A set of sites, stored as one byte per site.
struct Region {
  SpacetimeGrid grid;
  std::vector<std::uint8_t> mask;  // nsites entries, 0 or 1

  Region() = default;
  explicit Region(const SpacetimeGrid& g) : grid(g), mask(std::size_t(g.nsites()), 0) {}

  static Region box(const SpacetimeGrid& g, int t0, int t1,
                    const std::vector<int>& xlo, const std::vector<int>& xhi) {
    Region r(g);
    for (int t = std::max(0, t0); t <= std::min(g.nt - 1, t1); ++t)
      for (long xf = 0; xf < g.nspace(); ++xf) {
        auto c = g.xcoords(xf);
        bool in = true;
        for (std::size_t i = 0; i < c.size(); ++i)
          if (c[i] < xlo[i] || c[i] > xhi[i]) in = false;
        if (in) r.mask[std::size_t(g.site(t, xf))] = 1;
      }
    return r;
  }

  bool at(long s) const { return mask[std::size_t(s)] != 0; }
  void set(long s, bool v = true) { mask[std::size_t(s)] = v ? 1 : 0; }
  long count() const {
    long c = 0;
    for (auto b : mask) c += b;
    return c;
  }
  bool empty() const { return count() == 0; }

  bool subset_of(const Region& o) const {
    for (std::size_t s = 0; s < mask.size(); ++s)
      if (mask[s] && !o.mask[s]) return false;
    return true;
  }
  bool operator==(const Region& o) const { return mask == o.mask; }

  Region complement() const {
    Region r(grid);
    for (std::size_t s = 0; s < mask.size(); ++s) r.mask[s] = mask[s] ? 0 : 1;
    return r;
  }

  // earliest and latest occupied slices; {-1,-1} when empty
  std::pair<int, int> time_extent() const {
    int lo = -1, hi = -1;
    for (int t = 0; t < grid.nt; ++t)
      for (long xf = 0; xf < grid.nspace(); ++xf)
        if (at(grid.site(t, xf))) {
          if (lo < 0) lo = t;
          hi = t;
          break;
        }
    return {lo, hi};
  }
};

namespace detail {

// one unit of spatial dilation (the l-infinity unit ball), per direction
inline void dilate_row(const SpacetimeGrid& g, const std::vector<std::uint8_t>& in,
                       std::vector<std::uint8_t>& out) {
  const long ns = g.nspace();
  out.assign(std::size_t(ns), 0);
  std::vector<std::uint8_t> cur = in;
  std::vector<std::uint8_t> nxt(in.size());
  for (std::size_t i = 0; i < g.nx.size(); ++i) {
    // stride of direction i in the flattened index
    long stride = 1;
    for (std::size_t j = i + 1; j < g.nx.size(); ++j) stride *= g.nx[j];
    const int n = g.nx[i];
    nxt = cur;
    for (long xf = 0; xf < ns; ++xf) {
      if (!cur[std::size_t(xf)]) continue;
      const int xi = int((xf / stride) % n);
      for (int s = -1; s <= 1; s += 2) {
        int yi = xi + s;
        if (g.topo == Topology::periodic)
          yi = (yi + n) % n;
        else if (yi < 0 || yi >= n)
          continue;
        nxt[std::size_t(xf + long(yi - xi) * stride)] = 1;
      }
    }
    cur = nxt;
  }
  out = cur;
}

}  // namespace detail

// Exact discrete causal future: row-by-row unit dilation unioned with the
// region itself. Idempotent and monotone by construction.
inline Region causal_future(const Region& r) {
  const SpacetimeGrid& g = r.grid;
  Region out(g);
  const long ns = g.nspace();
  std::vector<std::uint8_t> prev(std::size_t(ns), 0), dil;
  for (int t = 0; t < g.nt; ++t) {
    if (t > 0) {
      detail::dilate_row(g, prev, dil);
      prev = dil;
    }
    for (long xf = 0; xf < ns; ++xf) {
      if (r.at(g.site(t, xf))) prev[std::size_t(xf)] = 1;
      if (prev[std::size_t(xf)]) out.set(g.site(t, xf));
    }
  }
  return out;
}

inline Region time_mirror(const Region& r) {
  Region out(r.grid);
  for (int t = 0; t < r.grid.nt; ++t)
    for (long xf = 0; xf < r.grid.nspace(); ++xf)
      if (r.at(r.grid.site(t, xf))) out.set(r.grid.site(r.grid.nt - 1 - t, xf));
  return out;
}

inline Region causal_past(const Region& r) {
  return time_mirror(causal_future(time_mirror(r)));
}

// run-length encoding of the site mask, for reports: [start, len] pairs
inline std::vector<std::pair<long, long>> region_rle(const Region& r) {
  std::vector<std::pair<long, long>> runs;
  long start = -1;
  for (long s = 0; s <= long(r.mask.size()); ++s) {
    const bool on = s < long(r.mask.size()) && r.mask[std::size_t(s)];
    if (on && start < 0) start = s;
    if (!on && start >= 0) {
      runs.emplace_back(start, s - start);
      start = -1;
    }
  }
  return runs;
}

}  // namespace slab
