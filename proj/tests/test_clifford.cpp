#include <catch2/catch_amalgamated.hpp>

#include "slab/clifford.hpp"
#include "slab/tolerances.hpp"

using namespace slab;

namespace {

double max_abs(const MatC& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("anticommutators reproduce twice the metric", "[clifford]") {
  for (const CliffordRep& rep : {build_rep(2), build_rep(4),
                                 build_rep(2, Signature::mostly_plus)}) {
    const int f = rep.fiber;
    REQUIRE(int(rep.gamma.size()) == rep.dim);
    REQUIRE(int(rep.eta.size()) == rep.dim);
    for (int a = 0; a < rep.dim; ++a)
      for (int b = 0; b < rep.dim; ++b) {
        const MatC anti = rep.gamma[a] * rep.gamma[b] + rep.gamma[b] * rep.gamma[a];
        const MatC want =
            (a == b ? 2.0 * rep.eta[a] : 0.0) * MatC::Identity(f, f);
        INFO("rep " << rep.name << " a " << a << " b " << b);
        CHECK(max_abs(anti - want) <= tol::matrix);
      }
  }
}

TEST_CASE("spinor metric is symmetric and makes clifford action hermitian",
          "[clifford]") {
  for (const CliffordRep& rep : {build_rep(2), build_rep(4),
                                 build_rep(2, Signature::mostly_plus)}) {
    const int f = rep.fiber;
    CHECK(max_abs(rep.h - rep.h.transpose()) <= tol::matrix);
    CHECK(max_abs(rep.h * rep.h_inv - MatC::Identity(f, f)) <= tol::matrix);
    for (int a = 0; a < rep.dim; ++a) {
      INFO("rep " << rep.name << " gamma " << a);
      CHECK(max_abs(rep.gamma[a].adjoint() * rep.h - rep.h * rep.gamma[a]) <=
            tol::matrix);
    }
  }
}

TEST_CASE("raised index flips only the spatial gammas in mostly-minus",
          "[clifford]") {
  const CliffordRep rep = build_rep(4);
  CHECK(max_abs(rep.gamma_raised(0) - rep.gamma[0]) == 0.0);
  for (int a = 1; a < rep.dim; ++a)
    CHECK(max_abs(rep.gamma_raised(a) + rep.gamma[a]) == 0.0);
}

TEST_CASE("signature conventions disagree only by the metric sign", "[clifford]") {
  const CliffordRep mm = build_rep(2, Signature::mostly_minus);
  const CliffordRep mp = build_rep(2, Signature::mostly_plus);
  REQUIRE(mm.eta[0] == 1.0);
  REQUIRE(mm.eta[1] == -1.0);
  REQUIRE(mp.eta[0] == -1.0);
  REQUIRE(mp.eta[1] == 1.0);
}

TEST_CASE("unsupported dimensions are rejected", "[clifford]") {
  CHECK_THROWS_AS(build_rep(3), ConfigError);
  CHECK_THROWS_AS(build_rep(5), ConfigError);
}
