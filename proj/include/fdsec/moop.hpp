#pragma once
#include <memory>
#include <string>
#include <vector>

#include "fdsec/sdp.hpp"

namespace fdsec {

struct ParetoPoint {
  double lambda1 = 0.0;
  double lambda2 = 1.0;
  SolveStatus status = SolveStatus::infeasible;
  double q1 = 0.0;  // watts, of the recovered policy
  double q2 = 0.0;
  double tau = 0.0;  // 0 at the anchors
  SecrecyRates secrecy;  // true channels, ZF receivers
  double max_rank_ratio = 0.0;
  double stage1_rank_ratio = 0.0;
  bool used_stage2 = false;
  double max_violation = 0.0;
  AllocationPolicy policy;
  double seconds = 0.0;
  std::string message;

  bool optimal() const { return status == SolveStatus::optimal; }
};

struct SweepOptions {
  // Non-empty: fixed beam directions (baseline scheme).
  std::vector<CVec> directions;
  SolverOptions solver;
  std::shared_ptr<const ConicBackend> backend = default_backend();
};

struct Anchors {
  ParetoPoint p1;  // lambda1 = 1
  ParetoPoint p2;  // lambda1 = 0
  double q1_star = 0.0;
  double q2_star = 0.0;
  bool feasible() const { return p1.optimal() && p2.optimal(); }
  // Worst status of the two anchor solves.
  SolveStatus status() const;
};

Anchors solve_anchors(const ChannelRealization& x, const SystemConfig& c, const SweepOptions& o = {});

// Tchebycheff point at lambda1; lambda1 of exactly 0 or 1 returns the anchor.
ParetoPoint solve_weighted(const ChannelRealization& x, const SystemConfig& c, double lambda1, const Anchors& a,
                           const SweepOptions& o = {});

// {0, step, 2 step, ..., 1}; the last point is pinned to exactly 1.
std::vector<double> lambda_grid(double step);

struct Frontier {
  Anchors anchors;
  std::vector<ParetoPoint> points;  // ascending lambda1
  // P1 or P2 did not solve: the drop is an outage, points carry the anchor status.
  bool outage() const { return !anchors.feasible(); }
};

Frontier sweep(const ChannelRealization& x, const SystemConfig& c, double lambda_step, const SweepOptions& o = {});

// Shape checks on the optimal points of a frontier (slack is relative to the
// larger of the two compared powers).
bool frontier_monotone(const std::vector<ParetoPoint>& pts, double slack = 1e-6);
// Index pairs (a, b) where a strictly dominates b in both objectives.
std::vector<std::pair<int, int>> dominated_pairs(const std::vector<ParetoPoint>& pts, double slack = 1e-6);

}  // namespace fdsec
