#pragma once
#include <string>
#include <vector>

#include "fdsec/hermitian.hpp"
#include "fdsec/physical.hpp"
#include "fdsec/scenario.hpp"

namespace fdsec {

using VarId = int;

enum class VarKind {
  scalar,     // one real coordinate
  hermitian,  // dim^2 real coordinates
  direction,  // Hermitian value p * d d^H with d fixed: one coordinate p
};

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::scalar;
  int dim = 1;     // matrix dimension for hermitian / direction
  CVec direction;  // unit vector for VarKind::direction

  int coords() const { return kind == VarKind::hermitian ? dim * dim : 1; }
  bool is_matrix() const { return kind != VarKind::scalar; }
};

// Stable integer ids for decision variables and their real coordinate offsets.
// A Hermitian variable of dimension n stores n^2 coordinates: first the n
// diagonal entries, then for each i < j the pair (Re X_ij, Im X_ij).
class VariableLayout {
 public:
  VarId add_scalar(const std::string& name);
  VarId add_hermitian(const std::string& name, int dim);
  VarId add_direction(const std::string& name, const CVec& unit_direction);

  int size() const { return static_cast<int>(specs_.size()); }
  int total_coords() const { return total_; }
  const VariableSpec& spec(VarId v) const { return specs_.at(v); }
  int offset(VarId v) const { return offsets_.at(v); }
  bool valid(VarId v) const { return v >= 0 && v < size(); }

 private:
  std::vector<VariableSpec> specs_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// Values for every coordinate of a layout.
struct Assignment {
  std::vector<double> x;

  double scalar(const VariableLayout& l, VarId v) const { return x.at(l.offset(v)); }
  CMat matrix(const VariableLayout& l, VarId v) const;
  void set_scalar(const VariableLayout& l, VarId v, double value) { x.at(l.offset(v)) = value; }
  void set_matrix(const VariableLayout& l, VarId v, const CMat& value);
};

// Coordinates of X in the Hermitian basis; and back.
std::vector<double> hermitian_coords(const CMat& X);
CMat hermitian_from_coords(const double* c, int n);
// Coefficients a with Tr(A X) = sum_i a_i c_i(X), for Hermitian A.
std::vector<double> trace_coefficients(const CMat& A);

// Hermitian matrix variable term weight * B^H X B, X of dimension B.rows().
struct CongruenceTerm {
  VarId var = -1;
  double weight = 1.0;
  CMat B;
};

// Scalar variable term x * C.
struct ScalarTerm {
  VarId var = -1;
  CMat C;
};

// Affine Hermitian-matrix-valued function of the decision variables, required PSD.
struct LmiBlock {
  std::string label;
  int dim = 0;
  CMat constant;
  std::vector<ScalarTerm> scalars;
  std::vector<CongruenceTerm> congruences;

  explicit LmiBlock(std::string l = {}, int n = 0) : label(std::move(l)), dim(n), constant(CMat::Zero(n, n)) {}
  HermitianMatrix evaluate(const VariableLayout& layout, const Assignment& a) const;
  // Matrix coefficient of one real coordinate of variable v (Hermitian).
  CMat coordinate_matrix(const VariableLayout& layout, VarId v, int coord) const;
  bool references(VarId v) const;
};

// c0 + sum over terms. Scalar variables use coef; matrix variables use Tr(A X),
// except that coef alone on a direction variable weights its power p.
struct LinearTerm {
  VarId var = -1;
  double coef = 0.0;
  CMat A;  // used for matrix variables
};

struct LinearForm {
  double constant = 0.0;
  std::vector<LinearTerm> terms;

  void add_scalar(VarId v, double c) { terms.push_back({v, c, {}}); }
  void add_trace(VarId v, const CMat& A) { terms.push_back({v, 0.0, A}); }
  double evaluate(const VariableLayout& layout, const Assignment& a) const;
  // Dense coefficient vector over all layout coordinates.
  std::vector<double> coefficients(const VariableLayout& layout) const;
};

struct AffineConstraint {
  enum class Sense { le, ge };
  std::string label;
  LinearForm form;  // constraint: form (sense) rhs
  Sense sense = Sense::ge;
  double rhs = 0.0;

  // Signed slack, >= 0 when satisfied.
  double slack(const VariableLayout& layout, const Assignment& a) const;
};

// Ids of every decision variable of the relaxed program.
struct ProblemVariables {
  std::vector<VarId> W;                 // [K]
  VarId Z = -1;
  std::vector<VarId> P;                 // [J]
  VarId tau = -1;                       // only when an epigraph is present
  std::vector<VarId> delta;             // [K]
  std::vector<std::vector<VarId>> t;    // [K][M]
  std::vector<std::vector<VarId>> alpha;  // [J][M]
  std::vector<std::vector<VarId>> beta;   // [J][M]
  std::vector<std::vector<VarId>> Mslack; // [J][M]
  int NT = 0;

  // Declares every variable. With directions non-empty, W_k becomes p_k d_k d_k^H.
  static ProblemVariables declare(VariableLayout& layout, int K, int J, int M, int NT, int NR, bool with_tau,
                                  const std::vector<CVec>& directions = {});
};

struct C1Data {
  int k = 0;
  CVec f_hat;     // [J]
  double eps = 0;  // stacked radius
  CVec h;
  double gamma_req = 1;
  double sigma2 = 0;
};

LmiBlock build_c1_lmi(const ProblemVariables& vars, const C1Data& d);

struct C2Data {
  int j = 0;
  std::vector<CVec> v;
  std::vector<CVec> g;
  double rho = 0;
  CMat H_SI;
  double sigma2 = 0;
  double gamma_req = 1;
};

AffineConstraint build_c2(const ProblemVariables& vars, const C2Data& d);

struct C3Data {
  int k = 0, m = 0;
  CMat L_hat;  // N_T x N_R
  double eps = 0;
  double xi = 1;
  double sigma2 = 0;
};

LmiBlock build_c3_lmi(const ProblemVariables& vars, const C3Data& d);

struct C4Data {
  int j = 0, m = 0;
  CVec e_hat;  // N_R
  double eps_ul = 0;
  CMat L_hat;
  double eps_dl = 0;
  double xi = 1;
  double sigma2 = 0;
};

std::pair<LmiBlock, LmiBlock> build_c4_lmis(const ProblemVariables& vars, const C4Data& d);

// lambda1 (sum Tr W_k + Tr Z - Q1*) <= tau and lambda2 (sum P_j - Q2*) <= tau.
std::pair<AffineConstraint, AffineConstraint> build_epigraph(const ProblemVariables& vars, double lambda1,
                                                             double lambda2, double q1_star, double q2_star);

// Reads the policy out of an assignment.
AllocationPolicy policy_from_assignment(const VariableLayout& layout, const ProblemVariables& vars,
                                        const Assignment& a);
// Inverse of policy_from_assignment; W_k of direction variables are projected onto their direction.
Assignment assignment_from_policy(const VariableLayout& layout, const ProblemVariables& vars,
                                  const AllocationPolicy& p);

}  // namespace fdsec
