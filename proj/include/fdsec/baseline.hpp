#pragma once
#include <vector>

#include "fdsec/moop.hpp"

namespace fdsec {

// Unit ZF transmit directions: h_k projected onto the orthogonal complement of
// the other users' channels. Throws DegenerateChannelError when K > N_T or a
// projection collapses.
std::vector<CVec> zf_directions(const std::vector<CVec>& h);

// Sweep options with the ZF directions of this drop filled in.
SweepOptions baseline_options(const ChannelRealization& x, SweepOptions o = {});

// Baseline anchors and Tchebycheff points; `anchors` must come from the baseline itself.
Anchors solve_baseline_anchors(const ChannelRealization& x, const SystemConfig& c, const SweepOptions& o = {});
ParetoPoint solve_baseline(const ChannelRealization& x, const SystemConfig& c, double lambda1, const Anchors& anchors,
                           const SweepOptions& o = {});
Frontier sweep_baseline(const ChannelRealization& x, const SystemConfig& c, double lambda_step,
                        const SweepOptions& o = {});

// Violation of a baseline policy, re-expressed with full W_k, against the proposed P1 program.
ViolationReport check_in_proposed(const AllocationPolicy& policy, const ChannelRealization& x, const SystemConfig& c);

}  // namespace fdsec
