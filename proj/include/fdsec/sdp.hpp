#pragma once
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fdsec/conic.hpp"
#include "fdsec/robust.hpp"

namespace fdsec {

enum class ProblemKind { P1, P2, P3, stage2 };

const char* problem_kind_name(ProblemKind k);

struct AssembleRequest {
  ProblemKind kind = ProblemKind::P1;
  std::optional<double> lambda1;  // P3 only
  std::optional<double> q1_star;  // P3 only
  std::optional<double> q2_star;  // P3 only
  // Non-empty: W_k = p_k d_k d_k^H with fixed unit directions (baseline scheme).
  std::vector<CVec> directions;
};

// Solver-agnostic relaxed program. Immutable once assembled.
struct ConicProgram {
  ProblemKind kind = ProblemKind::P1;
  std::string label;
  VariableLayout layout;
  ProblemVariables vars;
  LinearForm objective;  // minimized
  std::vector<LmiBlock> lmis;
  std::vector<AffineConstraint> affine;
  // Per coordinate: NaN when free, otherwise the value the coordinate is pinned to.
  std::vector<double> fixed;
  double lambda1 = -1;  // P3 weight, negative when not applicable

  int free_coords() const;
  bool is_fixed(int coord) const;
  // Throws ValidationError when a constraint or the objective references an unknown variable.
  void validate() const;
};

ConicProgram assemble(const ChannelRealization& x, const SystemConfig& c, const AssembleRequest& r);

enum class SolveStatus { optimal, infeasible, numerical_failure };
const char* solve_status_name(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0;
  double dual_objective = 0;
  bool has_dual = false;
  Assignment values;
  double max_violation = 0;
  std::string worst_constraint;
  double seconds = 0;
  int iterations = 0;
  std::string message;
};

struct ViolationReport {
  double max_violation = 0;
  std::string worst;
};

// Scale-free violation of every constraint of the program at an assignment.
// LMI blocks: -lambda_min of D^-1/2 S D^-1/2, D_pp the summed magnitudes of the
// additive terms on the diagonal, floored at kFeasTol * max D; affine rows:
// negative slack over the summed term magnitudes.
ViolationReport check_assignment(const ConicProgram& p, const Assignment& a);
double lmi_violation(const LmiBlock& b, const VariableLayout& layout, const Assignment& a);
double affine_violation(const AffineConstraint& c, const VariableLayout& layout, const Assignment& a);

// Real symmetric cone form of a program (free coordinates only).
struct RealForm {
  RealConeProblem problem;
  std::vector<int> column_coord;  // x column -> layout coordinate
  double objective_offset = 0;
};

RealForm to_real_cone(const ConicProgram& p);

constexpr double kFeasTol = 1e-6;
constexpr double kGapTol = 1e-6;
// Relative loosening of the second-stage constraints.
constexpr double kStage2Margin = 1e-8;

SolveReport solve(const ConicProgram& p, const SolverOptions& options = {},
                  const std::shared_ptr<const ConicBackend>& backend = default_backend());

struct Recovery {
  bool ok = false;              // policy is rank one and feasible
  bool used_stage2 = false;
  bool anomaly = false;         // rank test failed where the relaxation should be exact
  double max_rank_ratio = 0;    // over W_k actually returned
  double stage1_rank_ratio = 0;
  double max_violation = 0;     // of the recovered rank-one policy
  AllocationPolicy policy;
  SolveReport stage2;
  std::string message;
};

// Rank-one beamformers from an optimal report; runs the frozen second stage
// when the weight on the DL objective is zero and stage 1 is not rank one.
Recovery recover_rank_one(const ConicProgram& p, const SolveReport& r, const SolverOptions& options = {},
                          const std::shared_ptr<const ConicBackend>& backend = default_backend());

// Second-stage program: everything but W_k pinned to the stage-1 values,
// objective sum Tr(W_k) + Tr(Z), constraints loosened by kStage2Margin.
ConicProgram stage2_program(const ConicProgram& stage1, const Assignment& stage1_values);

// Plain-text dump: variable table, objective, then one record per constraint
// with dense coefficient listings.
void dump_program(const ConicProgram& p, std::ostream& os);

}  // namespace fdsec
