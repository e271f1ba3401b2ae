#pragma once
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fdsec/physical.hpp"
#include "fdsec/scenario.hpp"

namespace fdsec {

struct OracleOptions {
  int n_samples = 10000;           // per constraint
  double boundary_fraction = 0.25;  // share of samples drawn on the ball surface
  std::uint64_t seed = 0x6f7261636c65ULL;
  double feas_tol = 1e-6;
};

// One constraint instance (C1 per DL user, C2 per UL user, C3 per (k, m),
// C4 per (j, m)). Margins are relative: SINR / target - 1 and
// (R_tol - capacity) / R_tol.
struct ConstraintReport {
  std::string label;
  int samples = 0;
  int violations = 0;  // margin < -feas_tol
  double worst_margin = std::numeric_limits<double>::infinity();
  // Real coordinates (Re, Im interleaved) of the worst draw's errors.
  std::vector<double> worst_sample;
};

struct AdversarialReport {
  std::vector<ConstraintReport> constraints;
  double feas_tol = 1e-6;

  int violations() const;
  int violations(char family) const;  // family digit: '1', '2', '3', '4'
  double worst_margin() const;
  const ConstraintReport* worst() const;
  bool passed() const { return violations() == 0; }
};

// Samples the uncertainty balls around the estimates and evaluates the
// original SINR and capacity constraints. A zero radius gives a single
// deterministic evaluation.
AdversarialReport adversarial_check(const AllocationPolicy& policy, const ChannelRealization& x,
                                    const SystemConfig& c, const OracleOptions& o = {});

struct GridOptions {
  int directions = 2000;
  int q_points = 61;  // plus q = 0
  double q_decades_low = -4;
  double q_decades_high = 2;
  int quick_samples = 512;  // screening before the full check
  OracleOptions check;
};

struct GridBound {
  double q1 = std::numeric_limits<double>::infinity();  // +inf: nothing feasible on the grid
  double p = 0, q = 0, P = 0;
  CVec direction;
  long candidates = 0;
  long screened = 0;
  bool feasible() const { return q1 < std::numeric_limits<double>::infinity(); }
};

// Upper bound on the P1 optimum over w = sqrt(p) d (d from a deterministic
// net), Z = q I. Tiny instances only: K = 1, J <= 1, M <= 1, N_T <= 3.
// For each (d, q) the least (p, P_1) meeting the SINR targets is found in
// closed form; the candidates are then verified by sampling in order of Q1.
GridBound restricted_grid_bound(const ChannelRealization& x, const SystemConfig& c, const GridOptions& o = {});

// Deterministic unit-vector net modulo global phase.
std::vector<CVec> direction_net(int n_t, int count);

}  // namespace fdsec
