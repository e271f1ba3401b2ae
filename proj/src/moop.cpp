#include "fdsec/moop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fdsec/errors.hpp"

namespace fdsec {

namespace {

int severity(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return 0;
    case SolveStatus::infeasible: return 1;
    case SolveStatus::numerical_failure: return 2;
  }
  return 2;
}

ParetoPoint solve_point(const ChannelRealization& x, const SystemConfig& c, const AssembleRequest& req,
                        double lambda1, const SweepOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  ParetoPoint pt;
  pt.lambda1 = lambda1;
  pt.lambda2 = 1.0 - lambda1;

  const ConicProgram prog = assemble(x, c, req);
  const SolveReport rep = solve(prog, o.solver, o.backend);
  pt.status = rep.status;
  pt.message = rep.message;
  if (rep.status == SolveStatus::optimal) {
    const Recovery rec = recover_rank_one(prog, rep, o.solver, o.backend);
    pt.max_rank_ratio = rec.max_rank_ratio;
    pt.stage1_rank_ratio = rec.stage1_rank_ratio;
    pt.used_stage2 = rec.used_stage2;
    pt.max_violation = rec.max_violation;
    if (!rec.ok) {
      // A relaxation that solved but gave no usable beamformer is a solver-side failure.
      pt.status = SolveStatus::numerical_failure;
      pt.message = rec.message;
    } else {
      pt.policy = rec.policy;
      pt.q1 = pt.policy.q1();
      pt.q2 = pt.policy.q2();
      pt.tau = req.kind == ProblemKind::P3 ? pt.policy.aux.tau : 0.0;
      const NoisePowers n = NoisePowers::from(c);
      const ChannelView truth = ChannelView::truth(x);
      pt.secrecy = secrecy_rates(truth, pt.policy, zf_receivers(truth.g), n);
      if (rec.used_stage2) pt.message += pt.message.empty() ? "stage 2" : "; stage 2";
    }
  }
  pt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return pt;
}

}  // namespace

SolveStatus Anchors::status() const {
  return severity(p1.status) >= severity(p2.status) ? p1.status : p2.status;
}

Anchors solve_anchors(const ChannelRealization& x, const SystemConfig& c, const SweepOptions& o) {
  Anchors a;
  AssembleRequest r;
  r.directions = o.directions;
  r.kind = ProblemKind::P1;
  a.p1 = solve_point(x, c, r, 1.0, o);
  if (!a.p1.optimal()) {
    // P2 is not needed once the drop is an outage.
    a.p2 = a.p1;
    a.p2.lambda1 = 0.0;
    a.p2.lambda2 = 1.0;
    return a;
  }
  r.kind = ProblemKind::P2;
  a.p2 = solve_point(x, c, r, 0.0, o);
  a.q1_star = a.p1.q1;
  a.q2_star = a.p2.q2;
  return a;
}

ParetoPoint solve_weighted(const ChannelRealization& x, const SystemConfig& c, double lambda1, const Anchors& a,
                           const SweepOptions& o) {
  if (!(lambda1 >= 0.0 && lambda1 <= 1.0)) throw ValidationError("lambda1 must lie in [0, 1]");
  if (!a.feasible()) {
    // outage marker: every weight carries the failed anchor's status
    ParetoPoint pt;
    const ParetoPoint& failed = a.p1.optimal() ? a.p2 : a.p1;
    pt.status = failed.status;
    pt.message = failed.message;
    pt.lambda1 = lambda1;
    pt.lambda2 = 1.0 - lambda1;
    return pt;
  }
  if (lambda1 == 1.0) return a.p1;
  if (lambda1 == 0.0) return a.p2;
  AssembleRequest r;
  r.kind = ProblemKind::P3;
  r.lambda1 = lambda1;
  r.q1_star = a.q1_star;
  r.q2_star = a.q2_star;
  r.directions = o.directions;
  return solve_point(x, c, r, lambda1, o);
}

std::vector<double> lambda_grid(double step) {
  if (!(step > 0.0 && step <= 0.5)) throw ValidationError("lambda step must lie in (0, 0.5]");
  std::vector<double> g;
  const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(std::min(1.0, i * step));
  if (1.0 - g.back() > 1e-9) g.push_back(1.0);
  g.back() = 1.0;
  return g;
}

Frontier sweep(const ChannelRealization& x, const SystemConfig& c, double lambda_step, const SweepOptions& o) {
  const std::vector<double> grid = lambda_grid(lambda_step);
  Frontier f;
  f.anchors = solve_anchors(x, c, o);
  for (double l : grid) f.points.push_back(solve_weighted(x, c, l, f.anchors, o));
  return f;
}

bool frontier_monotone(const std::vector<ParetoPoint>& pts, double slack) {
  std::vector<const ParetoPoint*> v;
  for (const auto& p : pts)
    if (p.optimal()) v.push_back(&p);
  std::sort(v.begin(), v.end(), [](const ParetoPoint* a, const ParetoPoint* b) {
    return a->q1 != b->q1 ? a->q1 < b->q1 : a->q2 > b->q2;
  });
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i]->q2 > v[i - 1]->q2 + slack * std::max(v[i]->q2, v[i - 1]->q2)) return false;
  return true;
}

std::vector<std::pair<int, int>> dominated_pairs(const std::vector<ParetoPoint>& pts, double slack) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(pts.size());
  for (int a = 0; a < n; ++a) {
    if (!pts[a].optimal()) continue;
    for (int b = 0; b < n; ++b) {
      if (a == b || !pts[b].optimal()) continue;
      const bool lower1 = pts[a].q1 < pts[b].q1 - slack * std::max(pts[a].q1, pts[b].q1);
      const bool lower2 = pts[a].q2 < pts[b].q2 - slack * std::max(pts[a].q2, pts[b].q2);
      if (lower1 && lower2) out.emplace_back(a, b);
    }
  }
  return out;
}

}  // namespace fdsec
