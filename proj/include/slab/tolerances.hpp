#pragma once

// Pinned numeric tolerances and frozen conventions. Every identity check in
// the library and the test suite takes its threshold from here; nothing is
// tuned at call sites.

namespace slab {
namespace tol {

// fiber-level algebra (anticommutators, metric hermiticity)
inline constexpr double matrix = 1e-14;

// a single operator application or triangular solve
inline constexpr double single = 1e-12;

// compositions of several operator applications and solves
inline constexpr double composed = 1e-10;

// dense kernel comparisons (materialized operators)
inline constexpr double dense = 1e-11;

// dense duality checks (weighted-transpose relations)
inline constexpr double dense_adjoint = 1e-12;

// state equation and consistency conditions on reduced grids
inline constexpr double state = 1e-8;

// degenerate collapses that must be exact up to roundoff (zero potential)
inline constexpr double state_degenerate = 1e-12;

// functional algebra identities (Leibniz, Jacobi, associativity, CAR)
inline constexpr double funcalg = 1e-12;

// algebra-level Moller homomorphism checks
inline constexpr double funcalg_moller = 1e-10;

// gauge-change diagnostic of the coupled operator: the sampled phase and
// centered gradients leave a discretization residual far above roundoff
inline constexpr double gauge_diag = 1e-6;

// reciprocal condition number below which a one-step matrix or a gram
// matrix is treated as singular
inline constexpr double rcond_floor = 1e-13;

}  // namespace tol

// ------------------------------------------------------------- conventions

// Mass/sign convention of the operator; stamped into every report.
inline constexpr const char* kMassConvention = "D = i gamma^mu d_mu - m";

// Spatial sections are periodic by default; bounded sections are supported
// by the solver but carry only conservative cone validation.
inline constexpr const char* kTopologyConvention = "periodic-spatial-sections";

// Report payload schema.
inline constexpr const char* kSchemaVersion = "1";

// Star-product convention, frozen here: the first factor takes right
// derivatives, the second takes left derivatives, contracted through
//   B = (H^{-1} Omega H^{-1})^T
// with H the mode gram and Omega the state's mode kernel, and no additional
// scalar factor. The degree-1 anticommutator relation
//   f*g + g*f = i hbar * (causal mode form)(f, g)
// pins this choice; the symmetrization is insensitive to the transpose, so
// the transpose itself is part of the frozen convention, not a derived fact.
inline constexpr const char* kStarConvention =
    "right-derivative first factor; left-derivative second factor; "
    "B = (H^-1 Omega H^-1)^T; no extra scalar";

}  // namespace slab
