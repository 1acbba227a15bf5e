#pragma once

// Vacuum-type two-point states for the free slab theory and their pullback
// along Moller maps.
//
// The one-step evolution matrix of the free operator is diagonal in the
// spatial Fourier basis with fiber symbol
//   E(k) = F_{d-2}(k) ... F_0(k) - i dt eta00 m g0,
//   F_i(k) = (1-c) I + c (P+_i e^{-i th_i} + P-_i e^{+i th_i}),
// th_i = 2 pi k_i / n_i. A mode is called positive frequency when its
// eigenvalue has negative imaginary part (for small dt the eigenvalues sit
// near e^{-i w dt}). J(k) is the difference of the positive and negative
// frequency spectral projectors; massless k with sin th = 0 carry modes on
// the real axis, handled by the zero-mode policy: half_weight keeps them in
// the causal part only (an even split between the frequency signs),
// exclude_zero projects them out of the state kernel entirely, reject
// refuses to build.
//
// The state kernel is assembled from the causal Green operator S and the
// frequency-weighted X = S o M, where M multiplies each time slice in
// Fourier space by G^{-1} J(k) G:
//   omega(u, v) = (i/2) [ B(S u1, v2) + B(S v1, u2) ]
//               + (i/2) [ B(X u1, v2) - B(X v1, u2) ],
// with B the bilinear pairing of fields.hpp. The antisymmetry of the X term
// makes omega + omega^T land on the causal commutator form identically, and
// [J, E] = 0 makes omega vanish on equation directions up to telescoping
// boundary terms. Kernels are stored dense on the doubled index [sp; co],
// measure weight included: omega(u, v) = vec(u)^T K vec(v).

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "slab/clifford.hpp"
#include "slab/common.hpp"
#include "slab/fft.hpp"
#include "slab/fields.hpp"
#include "slab/green.hpp"
#include "slab/grid.hpp"
#include "slab/moller.hpp"

namespace slab {

enum class ZeroModePolicy { half_weight, exclude_zero, reject };

inline const char* to_string(ZeroModePolicy p) {
  switch (p) {
    case ZeroModePolicy::half_weight: return "half-weight";
    case ZeroModePolicy::exclude_zero: return "exclude-zero";
    default: return "reject";
  }
}

class SpectralSplit {
 public:
  CliffordRep rep;
  SpacetimeGrid grid;
  double mass = 0.0;
  ZeroModePolicy policy = ZeroModePolicy::half_weight;
  int zero_modes = 0;

  SpectralSplit(const CliffordRep& r, const SpacetimeGrid& g, double m,
                ZeroModePolicy zp = ZeroModePolicy::half_weight)
      : rep(r), grid(g), mass(m), policy(zp), fft_(g) {
    const int f = grid.fiber;
    const MatC G = cplx(0.0, -grid.dt * rep.eta[0]) * rep.gamma[0];
    const MatC Ginv = cplx(0.0, 1.0 / grid.dt) * rep.gamma[0];
    W_.reserve(std::size_t(grid.nspace()));
    P_.reserve(std::size_t(grid.nspace()));
    for (long kf = 0; kf < grid.nspace(); ++kf) {
      const MatC E = symbol(kf);
      const auto [J, Pi] = f == 2 ? sign_split_closed_form(E) : sign_split_eigen(E);
      W_.push_back(Ginv * J * G);
      P_.push_back(Ginv * Pi * G);
    }
    if (zero_modes > 0 && policy == ZeroModePolicy::reject)
      throw DomainError("hadamard: zero frequency modes present; "
                        "pick a zero-mode policy or give the field a mass");
  }

  // Fiber symbol of the free one-step evolution at flattened wave index kf.
  MatC symbol(long kf) const {
    const int f = grid.fiber;
    const double c = grid.cfl();
    const std::vector<int> kc = grid.xcoords(kf);
    MatC s = MatC::Identity(f, f);
    for (int i = 0; i < grid.dim - 1; ++i) {
      const double th = 2.0 * M_PI * double(kc[std::size_t(i)]) / double(grid.nx[std::size_t(i)]);
      const MatC alpha = velocity_matrix(rep, i);
      const MatC Pp = 0.5 * (MatC::Identity(f, f) + alpha);
      const MatC Pm = 0.5 * (MatC::Identity(f, f) - alpha);
      s = ((1.0 - c) * MatC::Identity(f, f) + c * std::exp(cplx(0.0, -th)) * Pp +
           c * std::exp(cplx(0.0, th)) * Pm) *
          s;
    }
    s -= cplx(0.0, grid.dt * rep.eta[0] * mass) * rep.gamma[0];
    return s;
  }

  // M: multiply every time slice in Fourier space by G^{-1} J(k) G.
  SpinorSection apply_multiplier(const SpinorSection& s) const { return slicewise(s, W_); }

  // Pi: same, with the projector onto the nonzero frequency subspace. Under
  // the half_weight policy this is the identity map.
  SpinorSection apply_projection(const SpinorSection& s) const {
    if (policy != ZeroModePolicy::exclude_zero) return s;
    return slicewise(s, P_);
  }

 private:
  std::vector<MatC> W_, P_;
  mutable SpatialFFT fft_;

  SpinorSection slicewise(const SpinorSection& s, const std::vector<MatC>& mult) const {
    if (!s.grid.same_shape(grid)) throw ShapeError("hadamard: section grid mismatch");
    SpinorSection out = s;
    const int f = grid.fiber;
    const long ns = grid.nspace();
    for (int t = 0; t < grid.nt; ++t) {
      cplx* slice = out.data.data() + std::size_t(t) * std::size_t(ns * f);
      fft_.forward(slice);
      for (long k = 0; k < ns; ++k)
        Eigen::Map<VecC>(slice + k * f, f) =
            mult[std::size_t(k)] * Eigen::Map<const VecC>(slice + k * f, f).eval();
      fft_.inverse(slice);
    }
    return out;
  }

  static constexpr double kZeroModeTol = 1e-10;

  // +1 positive frequency, -1 negative, 0 for a mode on the real axis
  double freq_sign(cplx lam) {
    if (std::abs(lam.imag()) < kZeroModeTol) {
      ++zero_modes;
      return 0.0;
    }
    return lam.imag() < 0.0 ? 1.0 : -1.0;
  }

 public:
  // fiber 2: J is an exact rational expression in the symbol and commutes
  // with it to machine precision; returns {J, projector onto nonzero
  // frequency modes}
  std::pair<MatC, MatC> sign_split_closed_form(const MatC& E) {
    const cplx tr = 0.5 * (E(0, 0) + E(1, 1));
    const cplx det = E(0, 0) * E(1, 1) - E(0, 1) * E(1, 0);
    const cplx root = std::sqrt(tr * tr - det);  // half the eigenvalue gap
    const cplx l1 = tr + root, l2 = tr - root;
    const double s1 = freq_sign(l1), s2 = freq_sign(l2);
    if (std::abs(root) < kZeroModeTol) {
      // coincident pair: the whole fiber is one frequency class
      const double keep = s1 == 0.0 ? 0.0 : 1.0;
      return {s1 * MatC::Identity(2, 2), keep * MatC::Identity(2, 2)};
    }
    const MatC P1 = (E - l2 * MatC::Identity(2, 2)) / (l1 - l2);
    const MatC P2 = MatC::Identity(2, 2) - P1;
    const MatC J = s1 * P1 + s2 * P2;
    const MatC Pi = (s1 == 0.0 ? 0.0 : 1.0) * P1 + (s2 == 0.0 ? 0.0 : 1.0) * P2;
    return {J, Pi};
  }

  std::pair<MatC, MatC> sign_split_eigen(const MatC& E) {
    Eigen::ComplexEigenSolver<MatC> es(E);
    if (es.info() != Eigen::Success)
      throw NumericError("hadamard: hamiltonian diagonalization failure");
    const MatC V = es.eigenvectors();
    const VecC lam = es.eigenvalues();
    VecC s(lam.size()), keep(lam.size());
    for (long j = 0; j < lam.size(); ++j) {
      if (std::abs(lam[j].imag()) < kZeroModeTol) {
        ++zero_modes;
        s[j] = 0.0;
        keep[j] = 0.0;
      } else {
        s[j] = lam[j].imag() < 0.0 ? 1.0 : -1.0;
        keep[j] = 1.0;
      }
    }
    Eigen::PartialPivLU<MatC> lu(V);
    const MatC vinv = lu.inverse();
    const MatC recon = V * lam.asDiagonal() * vinv;
    if (rel_residual_mat(recon, E) > 1e-10)
      throw NumericError("hadamard: hamiltonian diagonalization failure");
    return {V * s.asDiagonal() * vinv, V * keep.asDiagonal() * vinv};
  }

 private:
  static double rel_residual_mat(const MatC& a, const MatC& b) {
    const double scale = std::max({a.norm(), b.norm(), 1e-300});
    return (a - b).norm() / scale;
  }
};

// X = S o M on free uncharged spinor sections.
inline SpinorSection frequency_weighted_causal(const DiracOp& free_op, const SpectralSplit& split,
                                               const SpinorSection& s) {
  return free_op.causal(split.apply_multiplier(s), ConeCheck::off);
}

// S o Pi: the causal operator with the zero-frequency sector projected out
// when the policy asks for that, plain S otherwise.
inline SpinorSection projected_causal(const DiracOp& free_op, const SpectralSplit& split,
                                      const SpinorSection& s) {
  return free_op.causal(split.apply_projection(s), ConeCheck::off);
}

// ------------------------------------------------------- bilinear carriers

// W[S](u, v) = B(S u1, v2) + B(S v1, u2): the symmetric causal carrier.
inline cplx causal_carrier(const CliffordRep& rep, const DiracOp& op, const DoubledSection& u,
                           const DoubledSection& v) {
  return pairing(rep, op.causal(u.sp, ConeCheck::off), v.co) +
         pairing(rep, op.causal(v.sp, ConeCheck::off), u.co);
}

// W'[X](u, v) = B(X u1, v2) - B(X v1, u2): the antisymmetric frequency part.
inline cplx frequency_carrier(const CliffordRep& rep, const DiracOp& free_op,
                              const SpectralSplit& split, const DoubledSection& u,
                              const DoubledSection& v) {
  return pairing(rep, frequency_weighted_causal(free_op, split, u.sp), v.co) -
         pairing(rep, frequency_weighted_causal(free_op, split, v.sp), u.co);
}

// Operator-path evaluation of the vacuum kernel, no dense assembly. The
// causal carrier runs through the zero-mode projection so this path matches
// the dense assembly under every policy.
inline cplx vacuum_pair_eval(const CliffordRep& rep, const DiracOp& free_op,
                             const SpectralSplit& split, const DoubledSection& u,
                             const DoubledSection& v) {
  const cplx cc = pairing(rep, projected_causal(free_op, split, u.sp), v.co) +
                  pairing(rep, projected_causal(free_op, split, v.sp), u.co);
  return cplx(0.0, 0.5) * (cc + frequency_carrier(rep, free_op, split, u, v));
}

// ----------------------------------------------------------------- states

enum class StateProvenance { vacuum_construction, pullback };

inline const char* to_string(StateProvenance p) {
  return p == StateProvenance::vacuum_construction ? "vacuum-construction" : "pullback";
}

namespace detail {
inline std::uint64_t next_state_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}
}  // namespace detail

// Dense bilinear two-point kernel on the doubled index [sp; co]; the measure
// weight is folded in, so omega(u, v) = vec(u)^T kernel vec(v) on raw stored
// components.
struct TwoPointState {
  CliffordRep rep;
  SpacetimeGrid grid;
  Charge charge = Charge::uncharged;
  StateProvenance provenance = StateProvenance::vacuum_construction;
  ZeroModePolicy zero_mode_policy = ZeroModePolicy::half_weight;
  int zero_modes = 0;
  std::string weight_convention = "includes-measure";
  MatC kernel;
  std::uint64_t state_id = 0;
  std::uint64_t parent_id = 0;  // the state this one was pulled back from

  cplx operator()(const DoubledSection& u, const DoubledSection& v) const {
    if (!u.sp.grid.same_shape(grid) || !v.sp.grid.same_shape(grid))
      throw ShapeError("state: section grid mismatch");
    if (u.sp.charge != charge || v.sp.charge != charge)
      throw BundleError("state: charge tag mismatch");
    const long n = grid.nvals();
    VecC a(2 * n), b(2 * n);
    a.head(n) = Eigen::Map<const VecC>(u.sp.data.data(), n);
    a.tail(n) = Eigen::Map<const VecC>(u.co.data.data(), n);
    b.head(n) = Eigen::Map<const VecC>(v.sp.data.data(), n);
    b.tail(n) = Eigen::Map<const VecC>(v.co.data.data(), n);
    return (a.transpose() * (kernel * b)).value();
  }
};

// Vacuum kernel together with the dense causal commutator form it must sum
// to with its own transpose; both are assembled from one materialization of
// the causal operator, so the consistency identity holds bit for bit.
struct VacuumAssembly {
  TwoPointState state;
  MatC causal_form;  // kernel of i W[S o Pi] on the doubled index
};

// Assemble the vacuum kernel densely from the causal and frequency-weighted
// causal operators. The off-diagonal block layout realizes
//   K_sp,co = (i w/2) (H M_S)^T + (i w/2) (H M_X)^T,
//   K_co,sp = (i w/2) (H M_S)   - (i w/2) (H M_X),
// H = pointwise h, so K + K^T cancels the X terms exactly and doubles the
// causal ones.
inline VacuumAssembly build_vacuum_assembly(const CliffordRep& rep, const SpacetimeGrid& grid,
                                            double mass,
                                            ZeroModePolicy policy = ZeroModePolicy::half_weight,
                                            long cap = kDenseCapDefault) {
  const long n = grid.nvals();
  if (2 * n > cap) throw ConfigError("state: doubled index dimension exceeds the oracle cap");
  DiracOp free_op(rep, grid, mass);
  SpectralSplit split(rep, grid, mass, policy);
  DenseKernel MS = to_dense(
      [&](const SpinorSection& s) { return projected_causal(free_op, split, s); }, grid,
      Charge::uncharged, Leg::spinor, cap);
  DenseKernel MX = to_dense(
      [&](const SpinorSection& s) { return frequency_weighted_causal(free_op, split, s); }, grid,
      Charge::uncharged, Leg::spinor, cap);
  // pointwise h as a blockwise row recombination
  const int f = grid.fiber;
  MatC HM_S = MS.matrix, HM_X = MX.matrix;
  for (long site = 0; site < grid.nsites(); ++site) {
    HM_S.middleRows(site * f, f) = rep.h * HM_S.middleRows(site * f, f).eval();
    HM_X.middleRows(site * f, f) = rep.h * HM_X.middleRows(site * f, f).eval();
  }
  const cplx iw2 = cplx(0.0, 0.5 * grid.weight());
  const cplx iw = cplx(0.0, grid.weight());
  VacuumAssembly out;
  TwoPointState& st = out.state;
  st.rep = rep;
  st.grid = grid;
  st.charge = Charge::uncharged;
  st.provenance = StateProvenance::vacuum_construction;
  st.zero_mode_policy = policy;
  st.zero_modes = split.zero_modes;
  st.state_id = detail::next_state_id();
  st.kernel = MatC::Zero(2 * n, 2 * n);
  st.kernel.topRightCorner(n, n) = iw2 * HM_S.transpose() + iw2 * HM_X.transpose();
  st.kernel.bottomLeftCorner(n, n) = iw2 * HM_S - iw2 * HM_X;
  out.causal_form = MatC::Zero(2 * n, 2 * n);
  out.causal_form.topRightCorner(n, n) = iw * HM_S.transpose();
  out.causal_form.bottomLeftCorner(n, n) = iw * HM_S;
  return out;
}

inline TwoPointState build_vacuum_state(const CliffordRep& rep, const SpacetimeGrid& grid,
                                        double mass,
                                        ZeroModePolicy policy = ZeroModePolicy::half_weight,
                                        long cap = kDenseCapDefault) {
  return build_vacuum_assembly(rep, grid, mass, policy, cap).state;
}

// Pull a state back along the dual Moller map: omega_G(u, v) =
// omega(R* u, R* v), realized as M^T K M on the dense kernel.
inline TwoPointState pullback_state(const TwoPointState& st, const MollerMap& mm,
                                    long cap = kDenseCapDefault) {
  if (!st.grid.same_shape(mm.grid)) throw ShapeError("state: grid mismatch in pullback");
  if (st.charge != Charge::uncharged)
    throw BundleError("state: pullback starts from an uncharged state");
  DenseKernel M = to_dense_doubled(
      [&](const DoubledSection& u) { return moller_adjoint_apply(mm, u); }, mm.grid,
      Charge::charged, cap);
  TwoPointState out;
  out.rep = st.rep;
  out.grid = st.grid;
  out.charge = Charge::charged;
  out.provenance = StateProvenance::pullback;
  out.zero_mode_policy = st.zero_mode_policy;
  out.zero_modes = st.zero_modes;
  out.state_id = detail::next_state_id();
  out.parent_id = st.state_id;
  out.kernel = M.matrix.transpose() * st.kernel * M.matrix;
  return out;
}

// ------------------------------------------------------------- diagnostics

// Relative departure of the kernel from the h-hermitian reflection
// conj(K) = Sigma K^T Sigma, Sigma the leg swap. Zero would mean both
// off-diagonal blocks are hermitian; the one-sided time discretization
// leaves a residual of order dt.
inline double hermiticity_residual(const TwoPointState& st) {
  const long n = st.grid.nvals();
  MatC sw(2 * n, 2 * n);
  sw.topLeftCorner(n, n) = st.kernel.bottomRightCorner(n, n).transpose();
  sw.topRightCorner(n, n) = st.kernel.topRightCorner(n, n).transpose();
  sw.bottomLeftCorner(n, n) = st.kernel.bottomLeftCorner(n, n).transpose();
  sw.bottomRightCorner(n, n) = st.kernel.topLeftCorner(n, n).transpose();
  const MatC ck = st.kernel.conjugate();
  const double scale = std::max({ck.norm(), sw.norm(), 1e-300});
  return (ck - sw).norm() / scale;
}

// Extreme eigenvalues of the hermitian part of the kernel, reported for the
// positivity ledger; nothing is asserted about their signs.
inline std::pair<double, double> kernel_spectrum_bounds(const TwoPointState& st) {
  const MatC herm = 0.5 * (st.kernel + st.kernel.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> es(herm);
  if (es.info() != Eigen::Success) throw NumericError("state: spectrum computation failed");
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace slab
