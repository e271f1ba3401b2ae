#include "fdsec/baseline.hpp"

#include <Eigen/QR>

#include "fdsec/errors.hpp"

namespace fdsec {

std::vector<CVec> zf_directions(const std::vector<CVec>& h) {
  const int K = static_cast<int>(h.size());
  if (K == 0) return {};
  const int NT = static_cast<int>(h[0].size());
  if (K > NT) throw DegenerateChannelError("zf directions: more DL users than BS antennas");
  std::vector<CVec> d(K);
  for (int k = 0; k < K; ++k) {
    CVec r = h[k];
    if (K > 1) {
      CMat others(NT, K - 1);
      for (int i = 0, c = 0; i < K; ++i)
        if (i != k) others.col(c++) = h[i];
      Eigen::ColPivHouseholderQR<CMat> qr(others);
      qr.setThreshold(1e-10);
      if (qr.rank() < K - 1) throw DegenerateChannelError("zf directions: other users' channels are dependent");
      const CMat Q = CMat(qr.householderQ()).leftCols(K - 1);
      r -= Q * (Q.adjoint() * r);
      // second pass keeps the residual orthogonal to working precision
      r -= Q * (Q.adjoint() * r);
    }
    const double n = r.norm();
    if (!(n > 1e-10 * h[k].norm())) throw DegenerateChannelError("zf directions: channel lies in the others' span");
    d[k] = canonical_phase(CVec(r / n));
  }
  return d;
}

SweepOptions baseline_options(const ChannelRealization& x, SweepOptions o) {
  o.directions = zf_directions(x.h);
  return o;
}

Anchors solve_baseline_anchors(const ChannelRealization& x, const SystemConfig& c, const SweepOptions& o) {
  return solve_anchors(x, c, baseline_options(x, o));
}

ParetoPoint solve_baseline(const ChannelRealization& x, const SystemConfig& c, double lambda1, const Anchors& anchors,
                           const SweepOptions& o) {
  return solve_weighted(x, c, lambda1, anchors, baseline_options(x, o));
}

Frontier sweep_baseline(const ChannelRealization& x, const SystemConfig& c, double lambda_step,
                        const SweepOptions& o) {
  return sweep(x, c, lambda_step, baseline_options(x, o));
}

ViolationReport check_in_proposed(const AllocationPolicy& policy, const ChannelRealization& x, const SystemConfig& c) {
  AssembleRequest r;
  r.kind = ProblemKind::P1;
  const ConicProgram p = assemble(x, c, r);
  return check_assignment(p, assignment_from_policy(p.layout, p.vars, policy));
}

}  // namespace fdsec
