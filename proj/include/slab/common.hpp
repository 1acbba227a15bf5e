#pragma once

// Shared scalar types, error taxonomy, deterministic RNG and residual helpers.

#include <complex>
#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace slab {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

// Error taxonomy. The CLI maps these onto exit codes:
//   ConfigError / ShapeError / BundleError / DomainError / TruncationError -> 2
//   NumericError -> 3
// Identity failures are not exceptions; they are reported and drive exit 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BundleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic RNG. splitmix64 for the integer stream, 53-bit uniforms,
// Box-Muller for gaussians. Pinned here instead of <random> so that report
// bytes are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // standard complex gaussian, E|z|^2 = 2 (one Box-Muller pair)
  cplx cgauss() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double gauss() { return cgauss().real(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

inline double l2_norm(const std::vector<cplx>& a) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline double l2_dist(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw ShapeError("l2_dist: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

// Relative residual with a floor that keeps 0/0 comparisons meaningful.
inline double rel_residual(double dist, double na, double nb) {
  return dist / std::max({na, nb, 1e-300});
}

inline double rel_residual(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return rel_residual(l2_dist(a, b), l2_norm(a), l2_norm(b));
}

inline double rel_residual(const MatC& a, const MatC& b) {
  return rel_residual((a - b).norm(), a.norm(), b.norm());
}

inline double rel_residual(cplx a, cplx b) {
  return rel_residual(std::abs(a - b), std::abs(a), std::abs(b));
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex_u64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace slab
