#include "fdsec/sdp.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "fdsec/errors.hpp"

namespace fdsec {

const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::P1: return "P1";
    case ProblemKind::P2: return "P2";
    case ProblemKind::P3: return "P3";
    case ProblemKind::stage2: return "stage2";
  }
  return "?";
}

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

int ConicProgram::free_coords() const {
  int n = 0;
  for (double v : fixed) n += std::isnan(v) ? 1 : 0;
  return n;
}

bool ConicProgram::is_fixed(int coord) const { return !std::isnan(fixed.at(coord)); }

void ConicProgram::validate() const {
  if (static_cast<int>(fixed.size()) != layout.total_coords()) throw ValidationError("program: fixed table size");
  auto check_var = [&](VarId v, const std::string& where) {
    if (!layout.valid(v)) throw ValidationError("program: " + where + " references an undeclared variable");
  };
  for (const auto& t : objective.terms) check_var(t.var, "objective");
  for (const auto& c : affine)
    for (const auto& t : c.form.terms) check_var(t.var, c.label);
  for (const auto& b : lmis) {
    for (const auto& t : b.scalars) check_var(t.var, b.label);
    for (const auto& t : b.congruences) check_var(t.var, b.label);
  }
}

namespace {

void fix_var(ConicProgram& p, VarId v, double value) {
  const int off = p.layout.offset(v);
  for (int i = 0; i < p.layout.spec(v).coords(); ++i) p.fixed[off + i] = value;
}

AffineConstraint nonneg(const std::string& label, VarId v) {
  AffineConstraint c;
  c.label = label;
  c.sense = AffineConstraint::Sense::ge;
  c.form.add_scalar(v, 1.0);
  return c;
}

LmiBlock psd_block(const std::string& label, VarId v, int n) {
  LmiBlock b(label, n);
  b.congruences.push_back({v, 1.0, CMat::Identity(n, n)});
  return b;
}

std::string idx(int a) { return "[" + std::to_string(a) + "]"; }
std::string idx(int a, int b) { return "[" + std::to_string(a) + "," + std::to_string(b) + "]"; }

}  // namespace

ConicProgram assemble(const ChannelRealization& x, const SystemConfig& cfg, const AssembleRequest& r) {
  cfg.validate();
  if (r.kind == ProblemKind::stage2) throw ValidationError("assemble: stage-2 programs derive from a stage-1 solve");
  const bool p3 = r.kind == ProblemKind::P3;
  if (p3 && (!r.lambda1 || !r.q1_star || !r.q2_star))
    throw ValidationError("assemble: P3 needs lambda and both anchor values");
  if (!p3 && (r.lambda1 || r.q1_star || r.q2_star))
    throw ValidationError("assemble: lambda and anchors apply to P3 only");
  const int K = x.K(), J = x.J(), M = x.M(), NT = x.N_T();
  const int NR = M > 0 ? static_cast<int>(x.L_hat[0].cols()) : cfg.N_R;
  if (!r.directions.empty() && static_cast<int>(r.directions.size()) != K)
    throw ValidationError("assemble: one direction per DL user required");

  ConicProgram p;
  p.kind = r.kind;
  p.label = problem_kind_name(r.kind);
  p.vars = ProblemVariables::declare(p.layout, K, J, M, NT, NR, p3, r.directions);
  p.fixed.assign(p.layout.total_coords(), std::numeric_limits<double>::quiet_NaN());
  const ProblemVariables& v = p.vars;
  const NoisePowers noise = NoisePowers::from(cfg);

  std::vector<bool> free_delta(K, true);
  for (int k = 0; k < K; ++k) {
    C1Data d{k, x.f_hat_vec(k), x.eps_k(k), x.h[k], cfg.gamma_dl(), noise.sigma_dl};
    p.lmis.push_back(build_c1_lmi(v, d));
    if (!(d.eps > 0 && J > 0)) {
      fix_var(p, v.delta[k], 0.0);
      free_delta[k] = false;
    }
  }
  if (J > 0) {
    const auto recv = zf_receivers(x.g);
    for (int j = 0; j < J; ++j)
      p.affine.push_back(build_c2(v, C2Data{j, recv, x.g, noise.rho, x.H_SI, noise.sigma_ul, cfg.gamma_ul()}));
  }
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) {
      p.lmis.push_back(build_c3_lmi(v, C3Data{k, m, x.L_hat[m], x.eps_dl[m], cfg.xi_dl(), noise.sigma_eve}));
      if (x.eps_dl[m] == 0) fix_var(p, v.t[k][m], 0.0);
    }
  for (int j = 0; j < J; ++j)
    for (int m = 0; m < M; ++m) {
      auto ab = build_c4_lmis(
          v, C4Data{j, m, x.e_hat[j][m], x.eps_ul[j][m], x.L_hat[m], x.eps_dl[m], cfg.xi_ul(), noise.sigma_eve});
      p.lmis.push_back(std::move(ab.first));
      p.lmis.push_back(std::move(ab.second));
      if (x.eps_ul[j][m] == 0) fix_var(p, v.alpha[j][m], 0.0);
      if (x.eps_dl[m] == 0) fix_var(p, v.beta[j][m], 0.0);
    }

  // Sign constraints on powers and multipliers.
  for (int j = 0; j < J; ++j) p.affine.push_back(nonneg("C5" + idx(j), v.P[j]));
  for (int k = 0; k < K; ++k)
    if (free_delta[k]) p.affine.push_back(nonneg("C10:delta" + idx(k), v.delta[k]));
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      if (x.eps_dl[m] > 0) p.affine.push_back(nonneg("C10:t" + idx(k, m), v.t[k][m]));
  for (int j = 0; j < J; ++j)
    for (int m = 0; m < M; ++m) {
      if (x.eps_ul[j][m] > 0) p.affine.push_back(nonneg("C10:alpha" + idx(j, m), v.alpha[j][m]));
      if (x.eps_dl[m] > 0) p.affine.push_back(nonneg("C10:beta" + idx(j, m), v.beta[j][m]));
    }

  p.lmis.push_back(psd_block("C6", v.Z, NT));
  for (int k = 0; k < K; ++k) {
    if (p.layout.spec(v.W[k]).kind == VarKind::hermitian)
      p.lmis.push_back(psd_block("C7" + idx(k), v.W[k], NT));
    else
      p.affine.push_back(nonneg("C7" + idx(k), v.W[k]));
  }

  const CMat I = CMat::Identity(NT, NT);
  switch (r.kind) {
    case ProblemKind::P1:
      for (VarId w : v.W) p.objective.add_trace(w, I);
      p.objective.add_trace(v.Z, I);
      break;
    case ProblemKind::P2:
      for (VarId pj : v.P) p.objective.add_scalar(pj, 1.0);
      break;
    case ProblemKind::P3: {
      const double l1 = *r.lambda1;
      if (!(l1 >= 0 && l1 <= 1)) throw ValidationError("assemble: lambda1 must lie in [0, 1]");
      p.lambda1 = l1;
      auto epi = build_epigraph(v, l1, 1.0 - l1, *r.q1_star, *r.q2_star);
      p.affine.push_back(std::move(epi.first));
      p.affine.push_back(std::move(epi.second));
      p.objective.add_scalar(v.tau, 1.0);
      p.label = "P3(" + std::to_string(l1) + ")";
      break;
    }
    case ProblemKind::stage2: break;
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

namespace {

// Row scales of an LMI at a point: summed magnitudes of the additive terms on
// the diagonal. Rows whose terms all vanish would turn round-off into O(1)
// violations; their scale is floored at kFeasTol of the block's largest row.
RVec lmi_row_scale(const LmiBlock& b, const VariableLayout& layout, const Assignment& a) {
  RVec D = b.constant.diagonal().cwiseAbs();
  for (const auto& t : b.scalars) D += (a.scalar(layout, t.var) * t.C).diagonal().cwiseAbs();
  for (const auto& t : b.congruences)
    D += (t.weight * (t.B.adjoint() * a.matrix(layout, t.var) * t.B)).diagonal().cwiseAbs();
  return D.cwiseMax(kFeasTol * D.maxCoeff());
}

double affine_scale(const AffineConstraint& c, const VariableLayout& layout, const Assignment& a) {
  double mag = std::abs(c.form.constant) + std::abs(c.rhs);
  for (const auto& t : c.form.terms) {
    LinearForm one;
    one.terms.push_back(t);
    mag += std::abs(one.evaluate(layout, a));
  }
  return mag;
}

}  // namespace

double lmi_violation(const LmiBlock& b, const VariableLayout& layout, const Assignment& a) {
  CMat S = b.constant;
  for (const auto& t : b.scalars) S += a.scalar(layout, t.var) * t.C;
  for (const auto& t : b.congruences) S += t.weight * (t.B.adjoint() * a.matrix(layout, t.var) * t.B);
  const RVec D = lmi_row_scale(b, layout, a);
  RVec d(b.dim);
  for (int i = 0; i < b.dim; ++i) d[i] = D[i] > 0 ? 1.0 / std::sqrt(D[i]) : 1.0;
  const CMat Sh = d.cast<cd>().asDiagonal() * S * d.cast<cd>().asDiagonal();
  return std::max(0.0, -min_eigenvalue(HermitianMatrix::symmetrized(Sh)));
}

double affine_violation(const AffineConstraint& c, const VariableLayout& layout, const Assignment& a) {
  const double slack = c.slack(layout, a);
  if (slack >= 0) return 0.0;
  const double mag = affine_scale(c, layout, a);
  return mag > 0 ? -slack / mag : -slack;
}

ViolationReport check_assignment(const ConicProgram& p, const Assignment& a) {
  ViolationReport r;
  auto take = [&](double v, const std::string& label) {
    if (r.worst.empty() || v > r.max_violation) {
      r.max_violation = std::max(r.max_violation, v);
      r.worst = label;
    }
  };
  for (const auto& b : p.lmis) take(lmi_violation(b, p.layout, a), b.label);
  for (const auto& c : p.affine) take(affine_violation(c, p.layout, a), c.label);
  return r;
}

// ---------------------------------------------------------------------------

RealForm to_real_cone(const ConicProgram& p) {
  const int total = p.layout.total_coords();
  RealForm rf;
  std::vector<int> col(total, -1);
  Assignment base;
  base.x.assign(total, 0.0);
  for (int i = 0; i < total; ++i) {
    if (p.is_fixed(i)) {
      base.x[i] = p.fixed[i];
    } else {
      col[i] = static_cast<int>(rf.column_coord.size());
      rf.column_coord.push_back(i);
    }
  }
  const int n = static_cast<int>(rf.column_coord.size());
  RealConeProblem& q = rf.problem;
  q.n = n;
  q.c = RVec::Zero(n);
  {
    const auto a = p.objective.coefficients(p.layout);
    rf.objective_offset = p.objective.constant;
    for (int i = 0; i < total; ++i) {
      if (col[i] >= 0)
        q.c[col[i]] = a[i];
      else
        rf.objective_offset += a[i] * base.x[i];
    }
  }

  std::vector<RVec> rows;
  std::vector<double> hs;
  auto add_row = [&](const RVec& g, double h) {
    rows.push_back(g);
    hs.push_back(h);
  };

  for (const auto& c : p.affine) {
    const auto a = c.form.coefficients(p.layout);
    double a0 = c.form.constant;
    RVec g = RVec::Zero(n);
    bool any = false;
    for (int i = 0; i < total; ++i) {
      if (col[i] >= 0) {
        g[col[i]] = a[i];
        any = any || a[i] != 0.0;
      } else {
        a0 += a[i] * base.x[i];
      }
    }
    if (!any) continue;  // pinned entirely; checked after the solve
    if (c.sense == AffineConstraint::Sense::ge)
      add_row(-g, a0 - c.rhs);
    else
      add_row(g, c.rhs - a0);
  }

  for (const auto& b : p.lmis) {
    const CMat C = b.evaluate(p.layout, base).mat();
    std::vector<int> cols;
    std::vector<CMat> mats;
    std::vector<VarId> seen;
    auto visit = [&](VarId v) {
      for (VarId s : seen)
        if (s == v) return;
      seen.push_back(v);
      const int off = p.layout.offset(v);
      for (int k = 0; k < p.layout.spec(v).coords(); ++k) {
        if (col[off + k] < 0) continue;
        CMat A = b.coordinate_matrix(p.layout, v, k);
        if (A.cwiseAbs().maxCoeff() == 0.0) continue;
        cols.push_back(col[off + k]);
        mats.push_back(std::move(A));
      }
    };
    for (const auto& t : b.scalars) visit(t.var);
    for (const auto& t : b.congruences) visit(t.var);
    if (cols.empty()) continue;
    if (b.dim == 1) {
      RVec g = RVec::Zero(n);
      for (std::size_t t = 0; t < cols.size(); ++t) g[cols[t]] -= mats[t](0, 0).real();
      add_row(g, C(0, 0).real());
      continue;
    }
    PsdBlock blk;
    blk.size = 2 * b.dim;
    blk.h = real_embed(C);
    blk.cols = cols;
    for (const auto& A : mats) blk.G.push_back(-real_embed(CMat(0.5 * (A + A.adjoint()))));
    blk.complex_pairs = true;
    q.psd.push_back(std::move(blk));
  }

  q.G_lp = RMat::Zero(static_cast<int>(rows.size()), n);
  q.h_lp = RVec::Zero(static_cast<int>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    q.G_lp.row(r) = rows[r].transpose();
    q.h_lp[r] = hs[r];
  }
  return rf;
}

namespace {

// Interior-point iterates sit inside the cone only up to the primal residual;
// clip the round-off eigenvalues of the PSD-constrained matrix variables.
void project_psd_variables(const ConicProgram& p, Assignment& a) {
  std::vector<VarId> vs = p.vars.W;
  vs.push_back(p.vars.Z);
  for (VarId v : vs) {
    if (p.layout.spec(v).kind != VarKind::hermitian) continue;
    bool pinned = true;
    for (int i = 0; i < p.layout.spec(v).coords(); ++i) pinned = pinned && p.is_fixed(p.layout.offset(v) + i);
    if (pinned) continue;
    const HermitianEig e = eig_hermitian(HermitianMatrix::symmetrized(a.matrix(p.layout, v)));
    if (e.values.minCoeff() >= 0) continue;
    const RVec clipped = e.values.cwiseMax(0.0);
    const CMat X = e.vectors * clipped.cast<cd>().asDiagonal() * e.vectors.adjoint();
    a.set_matrix(p.layout, v, X);
  }
}

// Only the auxiliaries of violated constraints stay free; zero objective.
// Binding groups keep no interior once the policy is frozen, so they are
// left pinned and drop out of the program.
ConicProgram recenter_program(const ConicProgram& p, const Assignment& values) {
  ConicProgram q = p;
  std::vector<bool> policy(q.layout.size(), false);
  for (VarId v : q.vars.W) policy[v] = true;
  policy[q.vars.Z] = true;
  for (VarId v : q.vars.P) policy[v] = true;
  if (q.vars.tau >= 0) policy[q.vars.tau] = true;
  std::vector<bool> keep(q.layout.size(), false);
  for (const auto& b : p.lmis) {
    if (lmi_violation(b, p.layout, values) <= kFeasTol) continue;
    for (const auto& t : b.scalars) keep[t.var] = !policy[t.var];
    for (const auto& t : b.congruences) keep[t.var] = !policy[t.var];
  }
  for (VarId v = 0; v < q.layout.size(); ++v) {
    if (keep[v]) continue;
    const int off = q.layout.offset(v);
    for (int i = 0; i < q.layout.spec(v).coords(); ++i)
      if (!q.is_fixed(off + i)) q.fixed[off + i] = values.x.at(off + i);
  }
  q.objective = LinearForm{};
  q.label = p.label + "/recenter";
  return q;
}

SolveReport solve_impl(const ConicProgram& p, const SolverOptions& options,
                       const std::shared_ptr<const ConicBackend>& backend, bool recentering);

}  // namespace

SolveReport solve(const ConicProgram& p, const SolverOptions& options,
                  const std::shared_ptr<const ConicBackend>& backend) {
  SolveReport r = solve_impl(p, options, backend, false);
  if (r.status != SolveStatus::numerical_failure) return r;
  // Loose acceptance can stop on a point that misses the scale-free check;
  // one retry with the loose targets pulled in.
  SolverOptions tight = options;
  tight.loose_feastol *= 0.1;
  tight.loose_reltol *= 0.1;
  tight.max_iterations *= 2;
  SolveReport again = solve_impl(p, tight, backend, false);
  again.seconds += r.seconds;
  again.iterations += r.iterations;
  if (again.status != SolveStatus::numerical_failure) return again;
  r.seconds = again.seconds;
  r.iterations = again.iterations;
  return r;
}

namespace {

SolveReport solve_impl(const ConicProgram& p, const SolverOptions& options,
                       const std::shared_ptr<const ConicBackend>& backend, bool recentering) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  try {
    p.validate();
    const RealForm rf = to_real_cone(p);
    const ConeSolution s = backend->solve(rf.problem, options);
    rep.iterations = s.iterations;
    rep.message = s.message;
    switch (s.status) {
      case ConeStatus::optimal: rep.status = SolveStatus::optimal; break;
      case ConeStatus::primal_infeasible: rep.status = SolveStatus::infeasible; break;
      case ConeStatus::dual_infeasible:
        rep.status = SolveStatus::numerical_failure;
        if (rep.message.empty()) rep.message = "unbounded relaxation";
        break;
      case ConeStatus::numerical_failure: rep.status = SolveStatus::numerical_failure; break;
    }
    if (rep.status == SolveStatus::optimal) {
      rep.values.x.assign(p.layout.total_coords(), 0.0);
      for (int i = 0; i < p.layout.total_coords(); ++i)
        if (p.is_fixed(i)) rep.values.x[i] = p.fixed[i];
      for (std::size_t c = 0; c < rf.column_coord.size(); ++c) rep.values.x[rf.column_coord[c]] = s.x[c];
      project_psd_variables(p, rep.values);
      rep.objective = p.objective.evaluate(p.layout, rep.values);
      rep.dual_objective = s.dual_objective + rf.objective_offset;
      rep.has_dual = true;
      ViolationReport v = check_assignment(p, rep.values);
      if (v.max_violation > kFeasTol && !recentering) {
        // Multipliers and slacks of non-binding robust constraints can end
        // on the wrong side by round-off; re-center them with the policy frozen.
        const SolveReport aux = solve_impl(recenter_program(p, rep.values), options, backend, true);
        if (aux.status == SolveStatus::optimal) {
          Assignment merged = aux.values;
          v = check_assignment(p, merged);
          if (v.max_violation <= kFeasTol) {
            rep.values = std::move(merged);
            rep.iterations += aux.iterations;
            rep.message = rep.message.empty() ? "re-centered" : rep.message + "; re-centered";
          }
        }
        if (v.max_violation > kFeasTol) v = check_assignment(p, rep.values);
      }
      rep.max_violation = v.max_violation;
      rep.worst_constraint = v.worst;
      if (v.max_violation > kFeasTol) {
        rep.status = SolveStatus::numerical_failure;
        rep.message = "solution violates " + v.worst;
      }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    rep.status = SolveStatus::numerical_failure;
    rep.message = e.what();
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

// ---------------------------------------------------------------------------

ConicProgram stage2_program(const ConicProgram& stage1, const Assignment& values) {
  ConicProgram q = stage1;
  q.kind = ProblemKind::stage2;
  q.label = stage1.label + "/stage2";
  std::vector<bool> pinned(q.layout.size(), true);
  for (VarId w : q.vars.W) pinned[w] = false;
  for (VarId v = 0; v < q.layout.size(); ++v) {
    if (!pinned[v]) continue;
    const int off = q.layout.offset(v);
    for (int i = 0; i < q.layout.spec(v).coords(); ++i) q.fixed[off + i] = values.x.at(off + i);
  }
  // Constraints on pinned variables only are constants here; they held at stage 1 and
  // would only leave round-off infeasibility behind.
  auto free = [&](VarId v) { return v >= 0 && v < q.layout.size() && !pinned[v]; };
  std::erase_if(q.lmis, [&](const LmiBlock& b) {
    for (VarId v = 0; v < q.layout.size(); ++v)
      if (!pinned[v] && b.references(v)) return false;
    return true;
  });
  std::erase_if(q.affine, [&](const AffineConstraint& c) {
    return std::none_of(c.form.terms.begin(), c.form.terms.end(), [&](const LinearTerm& t) { return free(t.var); });
  });
  // With P_j pinned at its minimum the remaining set has no interior, which the
  // interior-point method cannot handle. Every constraint is loosened by a tiny
  // fraction of its own scale at the stage-1 point, making that point strictly
  // feasible; the result is checked against the unshifted program.
  for (auto& b : q.lmis) b.constant += (kStage2Margin * lmi_row_scale(b, q.layout, values)).cast<cd>().asDiagonal();
  for (auto& c : q.affine) {
    const double shift = kStage2Margin * affine_scale(c, q.layout, values);
    c.rhs += c.sense == AffineConstraint::Sense::ge ? -shift : shift;
  }
  q.objective = LinearForm{};
  const CMat I = CMat::Identity(q.vars.NT, q.vars.NT);
  for (VarId w : q.vars.W) q.objective.add_trace(w, I);
  q.objective.add_trace(q.vars.Z, I);
  return q;
}

namespace {

double max_ratio(const AllocationPolicy& pol) {
  double r = 0;
  for (const auto& W : pol.W) r = std::max(r, rank_ratio(W));
  return r;
}

}  // namespace

Recovery recover_rank_one(const ConicProgram& p, const SolveReport& r, const SolverOptions& options,
                          const std::shared_ptr<const ConicBackend>& backend) {
  Recovery rec;
  if (r.status != SolveStatus::optimal) {
    rec.message = "no optimal solution to recover from";
    return rec;
  }
  Assignment values = r.values;
  rec.policy = policy_from_assignment(p.layout, p.vars, values);
  rec.stage1_rank_ratio = max_ratio(rec.policy);
  rec.max_rank_ratio = rec.stage1_rank_ratio;

  if (rec.stage1_rank_ratio > kRankOneRatio) {
    const bool dl_weight_zero = p.kind == ProblemKind::P2 || (p.kind == ProblemKind::P3 && p.lambda1 == 0.0);
    if (!dl_weight_zero) {
      rec.anomaly = true;
      rec.message = "rank test failed with a positive DL weight";
      return rec;
    }
    rec.used_stage2 = true;
    rec.stage2 = solve(stage2_program(p, values), options, backend);
    if (rec.stage2.status != SolveStatus::optimal) {
      rec.message = std::string("stage 2 ended ") + solve_status_name(rec.stage2.status) + ": " + rec.stage2.message;
      return rec;
    }
    values = rec.stage2.values;
    rec.policy = policy_from_assignment(p.layout, p.vars, values);
    rec.max_rank_ratio = max_ratio(rec.policy);
    if (rec.max_rank_ratio > kRankOneRatio) {
      rec.anomaly = true;
      rec.message = "stage 2 did not return rank-one beamformers";
      return rec;
    }
  }

  rec.policy.w.clear();
  for (std::size_t k = 0; k < p.vars.W.size(); ++k) {
    const CVec w = principal_vector(rec.policy.W[k]);
    rec.policy.w.push_back(w);
    rec.policy.W[k] = HermitianMatrix::outer(w);
    values.set_matrix(p.layout, p.vars.W[k], rec.policy.W[k].mat());
  }
  const ViolationReport v = check_assignment(p, values);
  rec.max_violation = v.max_violation;
  rec.ok = v.max_violation <= kFeasTol;
  if (!rec.ok) rec.message = "recovered policy violates " + v.worst;
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::scalar: return "scalar";
    case VarKind::hermitian: return "hermitian";
    case VarKind::direction: return "direction";
  }
  return "?";
}

void dump_matrix(std::ostream& os, const CMat& A) {
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) os << ' ' << A(i, j).real() << ' ' << A(i, j).imag();
  os << '\n';
}

}  // namespace

void dump_program(const ConicProgram& p, std::ostream& os) {
  const auto old = os.precision(17);
  os << "conic-program 1\n";
  os << "label " << p.label << "\n";
  os << "variables " << p.layout.size() << " coords " << p.layout.total_coords() << "\n";
  for (VarId v = 0; v < p.layout.size(); ++v) {
    const auto& s = p.layout.spec(v);
    os << "var " << v << ' ' << s.name << ' ' << kind_name(s.kind) << ' ' << s.dim << " offset " << p.layout.offset(v);
    if (s.kind == VarKind::direction) {
      os << " direction";
      for (int i = 0; i < s.direction.size(); ++i) os << ' ' << s.direction[i].real() << ' ' << s.direction[i].imag();
    }
    os << '\n';
  }
  os << "fixed";
  for (int i = 0; i < p.layout.total_coords(); ++i)
    if (p.is_fixed(i)) os << ' ' << i << '=' << p.fixed[i];
  os << '\n';
  os << "objective " << p.objective.constant;
  for (double a : p.objective.coefficients(p.layout)) os << ' ' << a;
  os << '\n';
  for (const auto& c : p.affine) {
    os << "affine " << c.label << ' ' << (c.sense == AffineConstraint::Sense::ge ? "ge" : "le") << ' ' << c.rhs << ' '
       << c.form.constant;
    for (double a : c.form.coefficients(p.layout)) os << ' ' << a;
    os << '\n';
  }
  for (const auto& b : p.lmis) {
    os << "lmi " << b.label << ' ' << b.dim << "\n  constant";
    dump_matrix(os, b.constant);
    std::vector<VarId> seen;
    auto visit = [&](VarId v) {
      for (VarId s : seen)
        if (s == v) return;
      seen.push_back(v);
      for (int k = 0; k < p.layout.spec(v).coords(); ++k) {
        os << "  coord " << p.layout.offset(v) + k;
        dump_matrix(os, b.coordinate_matrix(p.layout, v, k));
      }
    };
    for (const auto& t : b.scalars) visit(t.var);
    for (const auto& t : b.congruences) visit(t.var);
  }
  os << "end\n";
  os.precision(old);
}

}  // namespace fdsec
