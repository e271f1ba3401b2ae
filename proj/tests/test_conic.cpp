#include <cmath>

#include "doctest.h"
#include "fdsec/conic.hpp"

using namespace fdsec;

namespace {

RealConeProblem lp(int n, RVec c, RMat G, RVec h) {
  RealConeProblem p;
  p.n = n;
  p.c = std::move(c);
  p.G_lp = std::move(G);
  p.h_lp = std::move(h);
  return p;
}

}  // namespace

TEST_CASE("LP with known optimum") {
  // min -x - y  s.t. x + y <= 1, x >= 0, y >= 0
  RMat G(3, 2);
  G << 1, 1, -1, 0, 0, -1;
  RVec h(3);
  h << 1, 0, 0;
  const auto sol = InteriorPointBackend().solve(lp(2, RVec::Constant(2, -1.0), G, h), {});
  REQUIRE(sol.status == ConeStatus::optimal);
  CHECK(sol.primal_objective == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(sol.dual_objective == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("badly scaled LP") {
  // min x1 + 1e6 x2  s.t. x1 >= 1e-9, x2 >= 3e-12
  RMat G(2, 2);
  G << -1, 0, 0, -1;
  RVec h(2);
  h << -1e-9, -3e-12;
  RVec c(2);
  c << 1, 1e6;
  const auto sol = InteriorPointBackend().solve(lp(2, c, G, h), {});
  REQUIRE(sol.status == ConeStatus::optimal);
  CHECK(sol.x[0] == doctest::Approx(1e-9).epsilon(1e-6));
  CHECK(sol.x[1] == doctest::Approx(3e-12).epsilon(1e-6));
}

TEST_CASE("infeasible LP is certified") {
  // x <= -1 and x >= 0
  RMat G(2, 1);
  G << 1, -1;
  RVec h(2);
  h << -1, 0;
  const auto sol = InteriorPointBackend().solve(lp(1, RVec::Constant(1, 1.0), G, h), {});
  CHECK(sol.status == ConeStatus::primal_infeasible);
}

TEST_CASE("unbounded LP reports dual infeasibility") {
  RMat G(1, 1);
  G << -1;
  RVec h(1);
  h << 0;
  const auto sol = InteriorPointBackend().solve(lp(1, RVec::Constant(1, -1.0), G, h), {});
  CHECK(sol.status == ConeStatus::dual_infeasible);
}

TEST_CASE("SDP: minimum eigenvalue as a cone program") {
  // max t s.t. A - t I >= 0  ->  t = lambda_min(A)
  RMat A(3, 3);
  A << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  RealConeProblem p;
  p.n = 1;
  p.c = RVec::Constant(1, -1.0);
  PsdBlock b;
  b.size = 3;
  b.h = A;
  b.cols = {0};
  b.G = {RMat::Identity(3, 3)};
  p.psd.push_back(b);
  const auto sol = InteriorPointBackend().solve(p, {});
  REQUIRE(sol.status == ConeStatus::optimal);
  Eigen::SelfAdjointEigenSolver<RMat> es(A);
  CHECK(sol.x[0] == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-8));
  // Dual is the projector onto the bottom eigenvector: trace one.
  CHECK(sol.z_psd[0].trace() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("SDP: trace minimization with a rank-one optimum") {
  // min Tr X  s.t. <a a^T, X> >= 1, X >= 0 (2x2 symmetric, 3 coords)
  // optimum 1/|a|^2 with X = a a^T / |a|^4
  RVec a(2);
  a << 3, 4;
  RealConeProblem p;
  p.n = 3;  // X11, X22, X12
  p.c = RVec(3);
  p.c << 1, 1, 0;
  p.G_lp = RMat(1, 3);
  p.G_lp << -a[0] * a[0], -a[1] * a[1], -2 * a[0] * a[1];
  p.h_lp = RVec::Constant(1, -1.0);
  PsdBlock b;
  b.size = 2;
  b.h = RMat::Zero(2, 2);
  b.cols = {0, 1, 2};
  RMat E11 = RMat::Zero(2, 2), E22 = RMat::Zero(2, 2), E12 = RMat::Zero(2, 2);
  E11(0, 0) = -1;
  E22(1, 1) = -1;
  E12(0, 1) = E12(1, 0) = -1;
  b.G = {E11, E22, E12};
  p.psd.push_back(b);
  const auto sol = InteriorPointBackend().solve(p, {});
  REQUIRE(sol.status == ConeStatus::optimal);
  CHECK(sol.primal_objective == doctest::Approx(1.0 / 25.0).epsilon(1e-8));
  CHECK(sol.x[2] == doctest::Approx(12.0 / 625.0).epsilon(1e-6));
}

TEST_CASE("infeasible SDP is certified") {
  // X >= 0 and X11 <= -1
  RealConeProblem p;
  p.n = 1;
  p.c = RVec::Constant(1, 1.0);
  p.G_lp = RMat::Constant(1, 1, 1.0);
  p.h_lp = RVec::Constant(1, -1.0);
  PsdBlock b;
  b.size = 1;
  b.h = RMat::Zero(1, 1);
  b.cols = {0};
  b.G = {RMat::Constant(1, 1, -1.0)};
  p.psd.push_back(b);
  const auto sol = InteriorPointBackend().solve(p, {});
  CHECK(sol.status == ConeStatus::primal_infeasible);
}
