#pragma once
#include <memory>
#include <string>
#include <vector>

#include "fdsec/hermitian.hpp"

namespace fdsec {

// Positive semidefinite block  h - sum_t x[cols[t]] * G[t]  >= 0.
struct PsdBlock {
  int size = 0;
  RMat h;
  std::vector<int> cols;
  std::vector<RMat> G;
  // True when the block is the real embedding of a Hermitian block: rows p
  // and p + size/2 are scaled together so the embedding structure survives.
  bool complex_pairs = false;
};

// minimize c^T x  subject to  h - G x in (nonnegative orthant) x (PSD blocks).
struct RealConeProblem {
  int n = 0;
  RVec c;
  RVec h_lp;
  RMat G_lp;  // rows x n
  std::vector<PsdBlock> psd;

  int lp_rows() const { return static_cast<int>(h_lp.size()); }
  void validate() const;
};

enum class ConeStatus { optimal, primal_infeasible, dual_infeasible, numerical_failure };

const char* cone_status_name(ConeStatus s);

struct ConeSolution {
  ConeStatus status = ConeStatus::numerical_failure;
  RVec x;
  RVec s_lp, z_lp;
  std::vector<RMat> s_psd, z_psd;
  double primal_objective = 0;
  double dual_objective = 0;
  int iterations = 0;
  double primal_residual = 0;  // relative, in the equilibrated problem
  double dual_residual = 0;
  double relative_gap = 0;
  std::string message;
};

struct SolverOptions {
  double feastol = 1e-9;
  double reltol = 1e-10;
  double abstol = 1e-12;
  // Accepted as optimal when progress stalls before the strict targets.
  double loose_feastol = 1e-7;
  double loose_reltol = 1e-6;
  // Farkas-ray residual accepted once the homogeneous scale has vanished.
  double weak_certificate_tol = 1e-6;
  int max_iterations = 100;
  int refinement = 1;
  int equilibration_passes = 12;
};

// Backend contract: a real symmetric-cone program in, primal/dual/status out.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual std::string name() const = 0;
  virtual ConeSolution solve(const RealConeProblem& problem, const SolverOptions& options) const = 0;
};

// Dense homogeneous self-dual primal-dual interior-point method with
// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
class InteriorPointBackend : public ConicBackend {
 public:
  std::string name() const override { return "hsd-ipm"; }
  ConeSolution solve(const RealConeProblem& problem, const SolverOptions& options) const override;
};

std::shared_ptr<const ConicBackend> default_backend();

}  // namespace fdsec
