#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fdsec/errors.hpp"
#include "fdsec/oracle.hpp"
#include "fdsec/sdp.hpp"

using namespace fdsec;

namespace {

// Negligible self-interference: nearly every drop is feasible.
SystemConfig easy() {
  SystemConfig c = SystemConfig::desk_defaults();
  c.rho_db = -150;
  return c;
}

SolveReport solve_kind(const ChannelRealization& x, const SystemConfig& c, ProblemKind k) {
  AssembleRequest r;
  r.kind = k;
  return solve(assemble(x, c, r));
}

}  // namespace

TEST_CASE("P1 layout has the expected size") {
  const SystemConfig c = easy();
  const ConicProgram p = assemble(generate_drop(c, 1), c, {});
  const int K = c.K, J = c.J, M = c.M;
  CHECK(p.vars.W.size() == static_cast<std::size_t>(K));
  CHECK(p.vars.P.size() == static_cast<std::size_t>(J));
  CHECK(p.vars.delta.size() == static_cast<std::size_t>(K));
  CHECK(p.vars.tau < 0);
  // K + 1 Hermitian N_T, J M Hermitian N_R, then J + K + K M + 2 J M scalars
  const int coords = (K + 1) * c.N_T * c.N_T + J * M * c.N_R * c.N_R + J + K + K * M + 2 * J * M;
  CHECK(p.layout.total_coords() == coords);
  // K C1 blocks, K M C3 blocks, 2 J M C4 blocks.
  CHECK(p.lmis.size() >= static_cast<std::size_t>(K + K * M + 2 * J * M));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("P3 needs its weight and anchors") {
  const SystemConfig c = easy();
  const auto x = generate_drop(c, 1);
  AssembleRequest r;
  r.kind = ProblemKind::P3;
  CHECK_THROWS_AS(assemble(x, c, r), ValidationError);
  r.lambda1 = 1.5;
  r.q1_star = 1;
  r.q2_star = 1;
  CHECK_THROWS_AS(assemble(x, c, r), ValidationError);
  r.lambda1 = 0.5;
  CHECK(assemble(x, c, r).vars.tau >= 0);
}

TEST_CASE("single user without uncertainty is MRT") {
  SystemConfig c = easy();
  c.K = 1;
  c.J = 0;
  c.M = 0;
  c.N_T = 4;
  c.kappa_est_sq = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto x = generate_drop(c, seed);
    const ConicProgram p = assemble(x, c, {});
    const SolveReport r = solve(p);
    REQUIRE(r.status == SolveStatus::optimal);
    const double mrt = c.gamma_dl() * c.sigma_dl() / x.h[0].squaredNorm();
    CHECK(r.objective == doctest::Approx(mrt).epsilon(1e-6));
    const Recovery rec = recover_rank_one(p, r);
    REQUIRE(rec.ok);
    CHECK(rec.policy.Z.mat().norm() <= 1e-6 * mrt);
    // the beam is aligned with the channel
    const double align = std::abs(x.h[0].dot(rec.policy.w[0])) / (x.h[0].norm() * rec.policy.w[0].norm());
    CHECK(align == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("P1 solution is feasible and the duality gap closes") {
  const SystemConfig c = easy();
  int solved = 0;
  for (int seed = 0; seed < 4; ++seed) {
    const auto x = generate_drop(c, seed);
    const ConicProgram p = assemble(x, c, {});
    const SolveReport r = solve(p);
    if (r.status != SolveStatus::optimal) continue;
    ++solved;
    CHECK(r.max_violation <= kFeasTol);
    CHECK(check_assignment(p, r.values).max_violation <= kFeasTol);
    REQUIRE(r.has_dual);
    CHECK(std::abs(r.objective - r.dual_objective) <= kGapTol * std::max(1.0, std::abs(r.objective)));
    CHECK(p.objective.evaluate(p.layout, r.values) == doctest::Approx(r.objective).epsilon(1e-8));
    const Recovery rec = recover_rank_one(p, r);
    CHECK(rec.ok);
    CHECK(!rec.used_stage2);
    CHECK(rec.max_rank_ratio < 1e-6);
  }
  CHECK(solved >= 3);
}

TEST_CASE("the oracle accepts a robust solution") {
  const SystemConfig c = easy();
  const auto x = generate_drop(c, 2);
  const ConicProgram p = assemble(x, c, {});
  const SolveReport r = solve(p);
  REQUIRE(r.status == SolveStatus::optimal);
  const Recovery rec = recover_rank_one(p, r);
  REQUIRE(rec.ok);
  OracleOptions o;
  o.n_samples = 2000;
  const AdversarialReport a = adversarial_check(rec.policy, x, c, o);
  CHECK(a.violations() == 0);
  CHECK(a.violations('4') == 0);
}

TEST_CASE("an impossible SINR target is infeasible") {
  SystemConfig c = easy();
  c.gamma_ul_req_db = 80;  // ZF leaves the self-interference floor
  c.rho_db = -80;
  const auto x = generate_drop(c, 3);
  CHECK(solve_kind(x, c, ProblemKind::P1).status == SolveStatus::infeasible);
}

TEST_CASE("P3 at full DL weight reproduces P1") {
  const SystemConfig c = easy();
  const auto x = generate_drop(c, 4);
  const SolveReport r1 = solve_kind(x, c, ProblemKind::P1);
  const SolveReport r2 = solve_kind(x, c, ProblemKind::P2);
  REQUIRE(r1.status == SolveStatus::optimal);
  REQUIRE(r2.status == SolveStatus::optimal);
  AssembleRequest q;
  q.kind = ProblemKind::P3;
  q.lambda1 = 1.0;
  q.q1_star = r1.objective;
  q.q2_star = r2.objective;
  const ConicProgram p3 = assemble(x, c, q);
  const SolveReport r3 = solve(p3);
  REQUIRE(r3.status == SolveStatus::optimal);
  // tau = Q1 - Q1*, and the optimum drives it to zero
  CHECK(std::abs(r3.objective) <= 1e-6 * r1.objective);
  const AllocationPolicy pol = policy_from_assignment(p3.layout, p3.vars, r3.values);
  CHECK(pol.q1() == doctest::Approx(r1.objective).epsilon(1e-5));
}

TEST_CASE("constraint order does not matter") {
  const SystemConfig c = easy();
  const auto x = generate_drop(c, 5);
  ConicProgram p = assemble(x, c, {});
  const SolveReport a = solve(p);
  REQUIRE(a.status == SolveStatus::optimal);
  std::mt19937 g(3);
  std::shuffle(p.lmis.begin(), p.lmis.end(), g);
  std::shuffle(p.affine.begin(), p.affine.end(), g);
  const SolveReport b = solve(p);
  REQUIRE(b.status == SolveStatus::optimal);
  CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-6));
}

TEST_CASE("forced second stage keeps the UL powers and returns rank one") {
  const SystemConfig c = easy();
  int ran = 0;
  for (int seed = 0; seed < 3; ++seed) {
    const auto x = generate_drop(c, seed);
    const ConicProgram p2 = assemble(x, c, {ProblemKind::P2});
    const SolveReport r = solve(p2);
    if (r.status != SolveStatus::optimal) continue;
    ++ran;
    const ConicProgram s2 = stage2_program(p2, r.values);
    CHECK(s2.kind == ProblemKind::stage2);
    const SolveReport r2 = solve(s2);
    REQUIRE(r2.status == SolveStatus::optimal);
    const AllocationPolicy before = policy_from_assignment(p2.layout, p2.vars, r.values);
    const AllocationPolicy after = policy_from_assignment(s2.layout, s2.vars, r2.values);
    double sp0 = 0, sp1 = 0;
    for (int j = 0; j < c.J; ++j) {
      sp0 += before.P[j];
      sp1 += after.P[j];
    }
    CHECK(sp1 == doctest::Approx(sp0).epsilon(1e-12));
    CHECK(r2.max_violation <= kFeasTol);
    for (const auto& W : after.W) CHECK(rank_ratio(W) < kRankOneRatio);
    CHECK(after.q1() <= before.q1() * (1 + 1e-6));
  }
  CHECK(ran >= 2);
}

TEST_CASE("dump lists every constraint") {
  SystemConfig c = easy();
  c.K = 1;
  c.J = 1;
  c.M = 1;
  c.N_T = 2;
  c.N_R = 1;
  const ConicProgram p = assemble(generate_drop(c, 0), c, {});
  std::ostringstream os;
  dump_program(p, os);
  const std::string s = os.str();
  CHECK(s.find("C1") != std::string::npos);
  CHECK(s.find("C2") != std::string::npos);
  CHECK(s.find("C3") != std::string::npos);
  CHECK(s.find("C4") != std::string::npos);
  CHECK(s.find("objective") != std::string::npos);
}

TEST_CASE("a program referencing unknown variables is rejected") {
  const SystemConfig c = easy();
  ConicProgram p = assemble(generate_drop(c, 0), c, {});
  p.objective.add_scalar(VarId{9999}, 1.0);
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("second stage solves at the desk defaults") {
  // P_j at its minimum leaves the stage-2 set without interior; the margin restores one.
  const SystemConfig c = SystemConfig::desk_defaults();
  const auto x = generate_drop(c, 46);
  const ConicProgram p2 = assemble(x, c, {ProblemKind::P2});
  const SolveReport r = solve(p2);
  REQUIRE(r.status == SolveStatus::optimal);
  const ConicProgram s2 = stage2_program(p2, r.values);
  CHECK(s2.lmis.size() < p2.lmis.size());  // blocks without W_k are constants here
  const SolveReport r2 = solve(s2);
  REQUIRE(r2.status == SolveStatus::optimal);
  AllocationPolicy after = policy_from_assignment(s2.layout, s2.vars, r2.values);
  Assignment a = r2.values;
  for (std::size_t k = 0; k < after.W.size(); ++k) {
    CHECK(rank_ratio(after.W[k]) < kRankOneRatio);
    a.set_matrix(p2.layout, p2.vars.W[k], HermitianMatrix::outer(principal_vector(after.W[k])).mat());
  }
  CHECK(check_assignment(p2, a).max_violation <= kFeasTol);
}
