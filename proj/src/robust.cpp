#include "fdsec/robust.hpp"

#include <cmath>

#include "fdsec/errors.hpp"

namespace fdsec {

VarId VariableLayout::add_scalar(const std::string& name) {
  specs_.push_back(VariableSpec{name, VarKind::scalar, 1, {}});
  offsets_.push_back(total_);
  total_ += 1;
  return size() - 1;
}

VarId VariableLayout::add_hermitian(const std::string& name, int dim) {
  if (dim < 1) throw ValidationError("layout: hermitian dimension must be >= 1");
  specs_.push_back(VariableSpec{name, VarKind::hermitian, dim, {}});
  offsets_.push_back(total_);
  total_ += dim * dim;
  return size() - 1;
}

VarId VariableLayout::add_direction(const std::string& name, const CVec& unit_direction) {
  specs_.push_back(VariableSpec{name, VarKind::direction, static_cast<int>(unit_direction.size()), unit_direction});
  offsets_.push_back(total_);
  total_ += 1;
  return size() - 1;
}

std::vector<double> hermitian_coords(const CMat& X) {
  const int n = static_cast<int>(X.rows());
  std::vector<double> c;
  c.reserve(n * n);
  for (int i = 0; i < n; ++i) c.push_back(X(i, i).real());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cd v = 0.5 * (X(i, j) + std::conj(X(j, i)));
      c.push_back(v.real());
      c.push_back(v.imag());
    }
  return c;
}

CMat hermitian_from_coords(const double* c, int n) {
  CMat X(n, n);
  for (int i = 0; i < n; ++i) X(i, i) = c[i];
  int p = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      X(i, j) = cd(c[p], c[p + 1]);
      X(j, i) = cd(c[p], -c[p + 1]);
      p += 2;
    }
  return X;
}

std::vector<double> trace_coefficients(const CMat& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<double> a;
  a.reserve(n * n);
  for (int i = 0; i < n; ++i) a.push_back(A(i, i).real());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cd v = 0.5 * (A(i, j) + std::conj(A(j, i)));
      a.push_back(2.0 * v.real());
      a.push_back(2.0 * v.imag());
    }
  return a;
}

CMat Assignment::matrix(const VariableLayout& l, VarId v) const {
  const VariableSpec& s = l.spec(v);
  const double* c = x.data() + l.offset(v);
  if (s.kind == VarKind::hermitian) return hermitian_from_coords(c, s.dim);
  if (s.kind == VarKind::direction) return c[0] * (s.direction * s.direction.adjoint());
  return CMat::Constant(1, 1, cd(c[0], 0.0));
}

void Assignment::set_matrix(const VariableLayout& l, VarId v, const CMat& value) {
  const VariableSpec& s = l.spec(v);
  if (s.kind == VarKind::hermitian) {
    const auto c = hermitian_coords(value);
    std::copy(c.begin(), c.end(), x.begin() + l.offset(v));
  } else if (s.kind == VarKind::direction) {
    x.at(l.offset(v)) = (s.direction.adjoint() * value * s.direction)(0, 0).real();
  } else {
    x.at(l.offset(v)) = value(0, 0).real();
  }
}

HermitianMatrix LmiBlock::evaluate(const VariableLayout& layout, const Assignment& a) const {
  CMat S = constant;
  for (const auto& t : scalars) S += a.scalar(layout, t.var) * t.C;
  for (const auto& t : congruences) S += t.weight * (t.B.adjoint() * a.matrix(layout, t.var) * t.B);
  return HermitianMatrix::symmetrized(S);
}

bool LmiBlock::references(VarId v) const {
  for (const auto& t : scalars)
    if (t.var == v) return true;
  for (const auto& t : congruences)
    if (t.var == v) return true;
  return false;
}

CMat LmiBlock::coordinate_matrix(const VariableLayout& layout, VarId v, int coord) const {
  CMat out = CMat::Zero(dim, dim);
  const VariableSpec& s = layout.spec(v);
  for (const auto& t : scalars)
    if (t.var == v) out += t.C;
  for (const auto& t : congruences) {
    if (t.var != v) continue;
    if (s.kind == VarKind::direction) {
      const CVec bd = t.B.adjoint() * s.direction;
      out += t.weight * (bd * bd.adjoint());
      continue;
    }
    if (s.kind == VarKind::scalar) {
      out += t.weight * (t.B.adjoint() * t.B);
      continue;
    }
    const int n = s.dim;
    if (coord < n) {
      const CVec bi = t.B.row(coord).adjoint();
      out += t.weight * (bi * bi.adjoint());
      continue;
    }
    // Locate the (i, j) pair of an off-diagonal coordinate.
    int p = coord - n;
    const bool imag = (p % 2) == 1;
    p /= 2;
    int i = 0;
    while (p >= n - 1 - i) {
      p -= n - 1 - i;
      ++i;
    }
    const int j = i + 1 + p;
    const CVec bi = t.B.row(i).adjoint();
    const CVec bj = t.B.row(j).adjoint();
    const CMat cross = bi * bj.adjoint();  // B^H e_i e_j^T B
    if (!imag)
      out += t.weight * (cross + cross.adjoint());
    else
      out += t.weight * (cd(0, 1) * (cross - cross.adjoint()));
  }
  return out;
}

double LinearForm::evaluate(const VariableLayout& layout, const Assignment& a) const {
  double s = constant;
  for (const auto& t : terms) {
    const VariableSpec& sp = layout.spec(t.var);
    // a direction variable's single coordinate is its power p
    if (!sp.is_matrix() || (sp.kind == VarKind::direction && t.A.size() == 0))
      s += t.coef * a.scalar(layout, t.var);
    else
      s += (t.A * a.matrix(layout, t.var)).trace().real();
  }
  return s;
}

std::vector<double> LinearForm::coefficients(const VariableLayout& layout) const {
  std::vector<double> c(layout.total_coords(), 0.0);
  for (const auto& t : terms) {
    const VariableSpec& s = layout.spec(t.var);
    const int off = layout.offset(t.var);
    if (s.kind == VarKind::scalar || (s.kind == VarKind::direction && t.A.size() == 0)) {
      c[off] += t.coef;
    } else if (s.kind == VarKind::direction) {
      c[off] += (s.direction.adjoint() * t.A * s.direction)(0, 0).real();
    } else {
      const auto a = trace_coefficients(t.A);
      for (std::size_t i = 0; i < a.size(); ++i) c[off + i] += a[i];
    }
  }
  return c;
}

double AffineConstraint::slack(const VariableLayout& layout, const Assignment& a) const {
  const double v = form.evaluate(layout, a);
  return sense == Sense::ge ? v - rhs : rhs - v;
}

ProblemVariables ProblemVariables::declare(VariableLayout& layout, int K, int J, int M, int NT, int NR,
                                           bool with_tau, const std::vector<CVec>& directions) {
  ProblemVariables v;
  v.NT = NT;
  for (int k = 0; k < K; ++k) {
    const std::string name = "W" + std::to_string(k);
    v.W.push_back(directions.empty() ? layout.add_hermitian(name, NT) : layout.add_direction(name, directions.at(k)));
  }
  v.Z = layout.add_hermitian("Z", NT);
  for (int j = 0; j < J; ++j) v.P.push_back(layout.add_scalar("P" + std::to_string(j)));
  if (with_tau) v.tau = layout.add_scalar("tau");
  for (int k = 0; k < K; ++k) v.delta.push_back(layout.add_scalar("delta" + std::to_string(k)));
  v.t.assign(K, {});
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      v.t[k].push_back(layout.add_scalar("t" + std::to_string(k) + "_" + std::to_string(m)));
  v.alpha.assign(J, {});
  v.beta.assign(J, {});
  v.Mslack.assign(J, {});
  for (int j = 0; j < J; ++j)
    for (int m = 0; m < M; ++m) {
      const std::string s = std::to_string(j) + "_" + std::to_string(m);
      v.alpha[j].push_back(layout.add_scalar("alpha" + s));
      v.beta[j].push_back(layout.add_scalar("beta" + s));
      v.Mslack[j].push_back(layout.add_hermitian("M" + s, NR));
    }
  return v;
}

namespace {

CMat blockdiag_identity(int n1, double a, int n2, double b) {
  CMat D = CMat::Zero(n1 + n2, n1 + n2);
  for (int i = 0; i < n1; ++i) D(i, i) = a;
  for (int i = 0; i < n2; ++i) D(n1 + i, n1 + i) = b;
  return D;
}

}  // namespace

LmiBlock build_c1_lmi(const ProblemVariables& vars, const C1Data& d) {
  if (!(d.gamma_req > 0)) throw ValidationError("C1: DL SINR target must be > 0");
  if (d.eps < 0) throw ValidationError("C1: negative uncertainty radius");
  const int J = static_cast<int>(d.f_hat.size());
  const int K = static_cast<int>(vars.W.size());
  const int NT = static_cast<int>(d.h.size());
  const bool lifted = d.eps > 0 && J > 0;
  const int n = lifted ? J + 1 : 1;
  const int corner = n - 1;
  LmiBlock b("C1[" + std::to_string(d.k) + "]", n);
  b.constant(corner, corner) = -d.sigma2;

  // Interference from P_j through the estimate; with the lift the corner,
  // off-diagonal and diagonal entries come from one outer product.
  for (int j = 0; j < J; ++j) {
    CVec u = CVec::Zero(n);
    if (lifted) {
      u[j] = 1.0;
      u[corner] = std::conj(d.f_hat[j]);
    } else {
      u[corner] = std::abs(d.f_hat[j]);
    }
    b.scalars.push_back({vars.P[j], -(u * u.adjoint())});
  }
  if (lifted) b.scalars.push_back({vars.delta[d.k], blockdiag_identity(J, 1.0, 1, -d.eps * d.eps)});

  CMat Bh = CMat::Zero(NT, n);
  Bh.col(corner) = d.h;
  b.congruences.push_back({vars.Z, -1.0, Bh});
  for (int r = 0; r < K; ++r) b.congruences.push_back({vars.W[r], r == d.k ? 1.0 / d.gamma_req : -1.0, Bh});
  return b;
}

AffineConstraint build_c2(const ProblemVariables& vars, const C2Data& d) {
  const int J = static_cast<int>(d.g.size());
  const CVec& vj = d.v[d.j];
  AffineConstraint c;
  c.label = "C2[" + std::to_string(d.j) + "]";
  c.sense = AffineConstraint::Sense::ge;
  c.rhs = 0.0;
  c.form.constant = -d.gamma_req * d.sigma2 * vj.squaredNorm();
  for (int n = 0; n < J; ++n) {
    const double gain = std::norm(d.g[n].dot(vj));
    if (n == d.j)
      c.form.add_scalar(vars.P[n], gain);
    else if (gain != 0.0)
      c.form.add_scalar(vars.P[n], -d.gamma_req * gain);
  }
  const RVec weights = vj.cwiseAbs2();
  const CMat A = -d.gamma_req * d.rho * (d.H_SI.adjoint() * weights.cast<cd>().asDiagonal() * d.H_SI);
  const CMat Ah = 0.5 * (A + A.adjoint());
  c.form.add_trace(vars.Z, Ah);
  for (VarId w : vars.W) c.form.add_trace(w, Ah);
  return c;
}

LmiBlock build_c3_lmi(const ProblemVariables& vars, const C3Data& d) {
  if (d.eps < 0) throw ValidationError("C3: negative uncertainty radius");
  const int NT = static_cast<int>(d.L_hat.rows());
  const int NR = static_cast<int>(d.L_hat.cols());
  const std::string label = "C3[" + std::to_string(d.k) + "," + std::to_string(d.m) + "]";
  if (d.eps == 0) {
    LmiBlock b(label, NR);
    b.constant = d.xi * d.sigma2 * CMat::Identity(NR, NR);
    b.congruences.push_back({vars.Z, d.xi, d.L_hat});
    b.congruences.push_back({vars.W[d.k], -1.0, d.L_hat});
    return b;
  }
  LmiBlock b(label, NR + NT);
  CMat BL(NT, NR + NT);
  BL << d.L_hat, CMat::Identity(NT, NT);
  b.constant = blockdiag_identity(NR, d.xi * d.sigma2, NT, 0.0);
  b.scalars.push_back({vars.t[d.k][d.m], blockdiag_identity(NR, -1.0, NT, 1.0 / (d.eps * d.eps))});
  b.congruences.push_back({vars.Z, d.xi, BL});
  b.congruences.push_back({vars.W[d.k], -1.0, BL});
  return b;
}

std::pair<LmiBlock, LmiBlock> build_c4_lmis(const ProblemVariables& vars, const C4Data& d) {
  if (d.eps_ul < 0 || d.eps_dl < 0) throw ValidationError("C4: negative uncertainty radius");
  const int NT = static_cast<int>(d.L_hat.rows());
  const int NR = static_cast<int>(d.L_hat.cols());
  const std::string idx = std::to_string(d.j) + "," + std::to_string(d.m);
  const VarId Mv = vars.Mslack[d.j][d.m];

  LmiBlock a;
  if (d.eps_ul == 0) {
    a = LmiBlock("C4a[" + idx + "]", NR);
    a.scalars.push_back({vars.P[d.j], -(d.e_hat * d.e_hat.adjoint())});
    a.congruences.push_back({Mv, 1.0, CMat::Identity(NR, NR)});
  } else {
    a = LmiBlock("C4a[" + idx + "]", NR + 1);
    CVec u(NR + 1);
    u << d.e_hat, cd(1.0, 0.0);
    a.scalars.push_back({vars.P[d.j], -(u * u.adjoint())});
    a.scalars.push_back({vars.alpha[d.j][d.m], blockdiag_identity(NR, -1.0, 1, 1.0 / (d.eps_ul * d.eps_ul))});
    CMat S = CMat::Zero(NR, NR + 1);
    S.leftCols(NR) = CMat::Identity(NR, NR);
    a.congruences.push_back({Mv, 1.0, S});
  }

  LmiBlock b;
  if (d.eps_dl == 0) {
    b = LmiBlock("C4b[" + idx + "]", NR);
    b.constant = d.xi * d.sigma2 * CMat::Identity(NR, NR);
    b.congruences.push_back({vars.Z, d.xi, d.L_hat});
    b.congruences.push_back({Mv, -1.0, CMat::Identity(NR, NR)});
  } else {
    b = LmiBlock("C4b[" + idx + "]", NR + NT);
    CMat BL(NT, NR + NT);
    BL << d.L_hat, CMat::Identity(NT, NT);
    b.constant = blockdiag_identity(NR, d.xi * d.sigma2, NT, 0.0);
    b.scalars.push_back({vars.beta[d.j][d.m], blockdiag_identity(NR, -1.0, NT, 1.0 / (d.eps_dl * d.eps_dl))});
    b.congruences.push_back({vars.Z, d.xi, BL});
    CMat S = CMat::Zero(NR, NR + NT);
    S.leftCols(NR) = CMat::Identity(NR, NR);
    b.congruences.push_back({Mv, -1.0, S});
  }
  return {a, b};
}

std::pair<AffineConstraint, AffineConstraint> build_epigraph(const ProblemVariables& vars, double lambda1,
                                                             double lambda2, double q1_star, double q2_star) {
  if (vars.tau < 0) throw ValidationError("epigraph: tau variable not declared");
  if (lambda1 < 0 || lambda2 < 0 || std::abs(lambda1 + lambda2 - 1.0) > 1e-12)
    throw ValidationError("epigraph: weights must be nonnegative and sum to 1");
  if (!std::isfinite(q1_star) || !std::isfinite(q2_star)) throw ValidationError("epigraph: anchors must be finite");
  AffineConstraint c1, c2;
  c1.label = "C9[1]";
  c1.sense = AffineConstraint::Sense::le;
  c1.rhs = lambda1 * q1_star;
  c2.label = "C9[2]";
  c2.sense = AffineConstraint::Sense::le;
  c2.rhs = lambda2 * q2_star;
  const CMat I = CMat::Identity(vars.NT, vars.NT);
  for (VarId w : vars.W) c1.form.add_trace(w, lambda1 * I);
  c1.form.add_trace(vars.Z, lambda1 * I);
  c1.form.add_scalar(vars.tau, -1.0);
  c2.form.add_scalar(vars.tau, -1.0);
  for (VarId p : vars.P) c2.form.add_scalar(p, lambda2);
  return {c1, c2};
}

AllocationPolicy policy_from_assignment(const VariableLayout& layout, const ProblemVariables& vars,
                                        const Assignment& a) {
  AllocationPolicy p;
  for (VarId w : vars.W) p.W.push_back(HermitianMatrix::symmetrized(a.matrix(layout, w)));
  p.Z = HermitianMatrix::symmetrized(a.matrix(layout, vars.Z));
  for (VarId v : vars.P) p.P.push_back(a.scalar(layout, v));
  p.aux.tau = vars.tau >= 0 ? a.scalar(layout, vars.tau) : 0.0;
  for (VarId v : vars.delta) p.aux.delta.push_back(a.scalar(layout, v));
  for (const auto& row : vars.t) {
    p.aux.t.emplace_back();
    for (VarId v : row) p.aux.t.back().push_back(a.scalar(layout, v));
  }
  for (std::size_t j = 0; j < vars.alpha.size(); ++j) {
    p.aux.alpha.emplace_back();
    p.aux.beta.emplace_back();
    p.aux.M_slack.emplace_back();
    for (std::size_t m = 0; m < vars.alpha[j].size(); ++m) {
      p.aux.alpha[j].push_back(a.scalar(layout, vars.alpha[j][m]));
      p.aux.beta[j].push_back(a.scalar(layout, vars.beta[j][m]));
      p.aux.M_slack[j].push_back(HermitianMatrix::symmetrized(a.matrix(layout, vars.Mslack[j][m])));
    }
  }
  return p;
}

Assignment assignment_from_policy(const VariableLayout& layout, const ProblemVariables& vars,
                                  const AllocationPolicy& p) {
  Assignment a;
  a.x.assign(layout.total_coords(), 0.0);
  for (std::size_t k = 0; k < vars.W.size(); ++k) a.set_matrix(layout, vars.W[k], p.W.at(k).mat());
  a.set_matrix(layout, vars.Z, p.Z.mat());
  for (std::size_t j = 0; j < vars.P.size(); ++j) a.set_scalar(layout, vars.P[j], p.P.at(j));
  if (vars.tau >= 0) a.set_scalar(layout, vars.tau, p.aux.tau);
  for (std::size_t k = 0; k < vars.delta.size(); ++k) a.set_scalar(layout, vars.delta[k], p.aux.delta.at(k));
  for (std::size_t k = 0; k < vars.t.size(); ++k)
    for (std::size_t m = 0; m < vars.t[k].size(); ++m) a.set_scalar(layout, vars.t[k][m], p.aux.t.at(k).at(m));
  for (std::size_t j = 0; j < vars.alpha.size(); ++j)
    for (std::size_t m = 0; m < vars.alpha[j].size(); ++m) {
      a.set_scalar(layout, vars.alpha[j][m], p.aux.alpha.at(j).at(m));
      a.set_scalar(layout, vars.beta[j][m], p.aux.beta.at(j).at(m));
      a.set_matrix(layout, vars.Mslack[j][m], p.aux.M_slack.at(j).at(m).mat());
    }
  return a;
}

}  // namespace fdsec
