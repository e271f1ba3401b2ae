#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "fdsec/conic.hpp"
#include "fdsec/errors.hpp"
#include "fdsec/kernels.hpp"

namespace fdsec {

const char* cone_status_name(ConeStatus s) {
  switch (s) {
    case ConeStatus::optimal: return "optimal";
    case ConeStatus::primal_infeasible: return "primal-infeasible";
    case ConeStatus::dual_infeasible: return "dual-infeasible";
    case ConeStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

void RealConeProblem::validate() const {
  if (c.size() != n) throw ValidationError("cone problem: objective length mismatch");
  if (G_lp.rows() != h_lp.size() || (G_lp.rows() > 0 && G_lp.cols() != n))
    throw ValidationError("cone problem: LP block shape mismatch");
  for (const auto& b : psd) {
    if (b.h.rows() != b.size || b.h.cols() != b.size) throw ValidationError("cone problem: PSD constant shape");
    if (b.cols.size() != b.G.size()) throw ValidationError("cone problem: PSD column list mismatch");
    if (b.complex_pairs && b.size % 2 != 0) throw ValidationError("cone problem: paired block of odd size");
    for (std::size_t t = 0; t < b.cols.size(); ++t) {
      if (b.cols[t] < 0 || b.cols[t] >= n) throw ValidationError("cone problem: PSD column out of range");
      if (b.G[t].rows() != b.size || b.G[t].cols() != b.size) throw ValidationError("cone problem: PSD coefficient shape");
    }
  }
}

std::shared_ptr<const ConicBackend> default_backend() {
  static const auto backend = std::make_shared<InteriorPointBackend>();
  return backend;
}

namespace {

constexpr double kTiny = 1e-300;

struct ConeVec {
  RVec lp;
  std::vector<RMat> psd;
};

double mat_dot(const RMat& a, const RMat& b) {
  return kernels::dot(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

double cdot(const ConeVec& a, const ConeVec& b) {
  double s = a.lp.size() ? kernels::dot(a.lp.data(), b.lp.data(), a.lp.size()) : 0.0;
  for (std::size_t i = 0; i < a.psd.size(); ++i) s += mat_dot(a.psd[i], b.psd[i]);
  return s;
}

double cnorm(const ConeVec& a) { return std::sqrt(std::max(0.0, cdot(a, a))); }

void caxpy(double alpha, const ConeVec& x, ConeVec& y) {
  if (x.lp.size()) kernels::axpy(alpha, x.lp.data(), y.lp.data(), x.lp.size());
  for (std::size_t i = 0; i < x.psd.size(); ++i)
    kernels::axpy(alpha, x.psd[i].data(), y.psd[i].data(), static_cast<std::size_t>(x.psd[i].size()));
}

ConeVec cscaled(const ConeVec& x, double a) {
  ConeVec y = x;
  y.lp *= a;
  for (auto& m : y.psd) m *= a;
  return y;
}

// ---------------------------------------------------------------------------
// Equilibration

struct Equilibration {
  RealConeProblem p;
  RVec col;                  // x = theta_h * col .* xhat
  RVec row;                  // LP row factors
  std::vector<RVec> blk;     // PSD congruence factors
  double theta_h = 1.0;
  double theta_c = 1.0;
};

Equilibration equilibrate(const RealConeProblem& in, int passes) {
  Equilibration e;
  e.p = in;
  RealConeProblem& p = e.p;
  const int n = p.n;
  e.col = RVec::Ones(n);
  e.row = RVec::Ones(p.lp_rows());
  for (const auto& b : p.psd) e.blk.push_back(RVec::Ones(b.size));

  for (int pass = 0; pass < passes; ++pass) {
    RVec cn = RVec::Zero(n);
    RVec rn = RVec::Zero(p.lp_rows());
    for (int r = 0; r < p.lp_rows(); ++r)
      for (int i = 0; i < n; ++i) {
        const double a = std::abs(p.G_lp(r, i));
        cn[i] = std::max(cn[i], a);
        rn[r] = std::max(rn[r], a);
      }
    std::vector<RVec> bn;
    for (const auto& b : p.psd) {
      RVec v = RVec::Zero(b.size);
      for (std::size_t t = 0; t < b.cols.size(); ++t) {
        const RMat& G = b.G[t];
        const RVec rowmax = G.cwiseAbs().rowwise().maxCoeff();
        cn[b.cols[t]] = std::max(cn[b.cols[t]], rowmax.maxCoeff());
        v = v.cwiseMax(rowmax);
      }
      if (b.complex_pairs) {
        const int half = b.size / 2;
        for (int i = 0; i < half; ++i) v[i] = v[i + half] = std::max(v[i], v[i + half]);
      }
      bn.push_back(v);
    }
    auto factor = [](double nrm) { return nrm > kTiny ? 1.0 / std::sqrt(nrm) : 1.0; };
    RVec cf(n);
    for (int i = 0; i < n; ++i) cf[i] = factor(cn[i]);
    for (int r = 0; r < p.lp_rows(); ++r) {
      const double f = factor(rn[r]);
      p.G_lp.row(r) *= f;
      p.h_lp[r] *= f;
      e.row[r] *= f;
    }
    if (p.lp_rows() > 0) p.G_lp = p.G_lp * cf.asDiagonal();
    p.c = p.c.cwiseProduct(cf);
    e.col = e.col.cwiseProduct(cf);
    for (std::size_t bi = 0; bi < p.psd.size(); ++bi) {
      PsdBlock& b = p.psd[bi];
      RVec f(b.size);
      for (int i = 0; i < b.size; ++i) f[i] = factor(bn[bi][i]);
      for (std::size_t t = 0; t < b.cols.size(); ++t) b.G[t] = cf[b.cols[t]] * (f.asDiagonal() * b.G[t] * f.asDiagonal());
      b.h = f.asDiagonal() * b.h * f.asDiagonal();
      e.blk[bi] = e.blk[bi].cwiseProduct(f);
    }
  }

  double hn = p.h_lp.squaredNorm();
  for (const auto& b : p.psd) hn += b.h.squaredNorm();
  hn = std::sqrt(hn);
  const double cnrm = p.c.norm();
  e.theta_h = hn > kTiny ? hn : 1.0;
  e.theta_c = cnrm > kTiny ? cnrm : 1.0;
  p.h_lp /= e.theta_h;
  for (auto& b : p.psd) b.h /= e.theta_h;
  p.c /= e.theta_c;
  return e;
}

// ---------------------------------------------------------------------------
// Operators on the (equilibrated) problem

struct Ops {
  const RealConeProblem& p;

  ConeVec zeros() const {
    ConeVec v;
    v.lp = RVec::Zero(p.lp_rows());
    for (const auto& b : p.psd) v.psd.push_back(RMat::Zero(b.size, b.size));
    return v;
  }

  ConeVec identity() const {
    ConeVec v;
    v.lp = RVec::Ones(p.lp_rows());
    for (const auto& b : p.psd) v.psd.push_back(RMat::Identity(b.size, b.size));
    return v;
  }

  ConeVec h() const {
    ConeVec v;
    v.lp = p.h_lp;
    for (const auto& b : p.psd) v.psd.push_back(b.h);
    return v;
  }

  ConeVec G(const RVec& x) const {
    ConeVec v;
    v.lp = p.lp_rows() ? RVec(p.G_lp * x) : RVec();
    for (const auto& b : p.psd) {
      RMat m = RMat::Zero(b.size, b.size);
      for (std::size_t t = 0; t < b.cols.size(); ++t) {
        const double xi = x[b.cols[t]];
        if (xi != 0.0) kernels::axpy(xi, b.G[t].data(), m.data(), static_cast<std::size_t>(m.size()));
      }
      v.psd.push_back(std::move(m));
    }
    return v;
  }

  RVec GT(const ConeVec& z) const {
    RVec r = p.lp_rows() ? RVec(p.G_lp.transpose() * z.lp) : RVec(RVec::Zero(p.n));
    for (std::size_t bi = 0; bi < p.psd.size(); ++bi) {
      const auto& b = p.psd[bi];
      for (std::size_t t = 0; t < b.cols.size(); ++t) r[b.cols[t]] += mat_dot(b.G[t], z.psd[bi]);
    }
    return r;
  }

  int degree() const {
    int m = p.lp_rows();
    for (const auto& b : p.psd) m += b.size;
    return m;
  }
};

// Most negative step multiplier: returns the largest alpha with v + alpha * d
// in the cone, where v is a strictly feasible point given as lambda.
double min_eig_sym(const RMat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling

struct Scaling {
  RVec d;      // LP: W = diag(d)
  RVec lam_lp;
  std::vector<RMat> R, Rinv;
  std::vector<RVec> lam;
};

// NT scaling of a PSD pair (s, z): R with R^T z R = R^-1 s R^-T = diag(lam).
bool nt_block(const RMat& s, const RMat& z, RMat& R, RMat& Rinv, RVec& lam) {
  Eigen::LLT<RMat> ls(0.5 * (s + s.transpose()));
  Eigen::LLT<RMat> lz(0.5 * (z + z.transpose()));
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const RMat Ls = ls.matrixL();
  const RMat Lz = lz.matrixL();
  Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  lam = svd.singularValues();
  if (lam.minCoeff() <= 0.0 || !lam.allFinite()) return false;
  const RVec isq = lam.cwiseSqrt().cwiseInverse();
  R = Ls * svd.matrixV() * isq.asDiagonal();
  // Rinv = diag(sqrt(lam)) V^T Ls^-1
  RMat VtLinv = svd.matrixV().transpose();
  VtLinv = ls.matrixL().transpose().solve(VtLinv.transpose()).transpose();
  Rinv = lam.cwiseSqrt().asDiagonal() * VtLinv;
  return R.allFinite() && Rinv.allFinite();
}

bool initial_scaling(const Ops& ops, const ConeVec& s, const ConeVec& z, Scaling& w) {
  (void)ops;
  w.d = (s.lp.array() / z.lp.array()).sqrt();
  w.lam_lp = (s.lp.array() * z.lp.array()).sqrt();
  if (s.lp.size() && (s.lp.minCoeff() <= 0 || z.lp.minCoeff() <= 0)) return false;
  w.R.resize(s.psd.size());
  w.Rinv.resize(s.psd.size());
  w.lam.resize(s.psd.size());
  for (std::size_t b = 0; b < s.psd.size(); ++b)
    if (!nt_block(s.psd[b], z.psd[b], w.R[b], w.Rinv[b], w.lam[b])) return false;
  return true;
}

// W^-T u: scaled version of a primal-side quantity.
ConeVec scale_inv_t(const Scaling& w, const ConeVec& u) {
  ConeVec v;
  v.lp = u.lp.cwiseQuotient(w.d);
  for (std::size_t b = 0; b < u.psd.size(); ++b) v.psd.push_back(w.Rinv[b] * u.psd[b] * w.Rinv[b].transpose());
  return v;
}

// W^T u
ConeVec scale_t(const Scaling& w, const ConeVec& u) {
  ConeVec v;
  v.lp = u.lp.cwiseProduct(w.d);
  for (std::size_t b = 0; b < u.psd.size(); ++b) v.psd.push_back(w.R[b] * u.psd[b] * w.R[b].transpose());
  return v;
}

// W^-1 u
ConeVec scale_inv(const Scaling& w, const ConeVec& u) {
  ConeVec v;
  v.lp = u.lp.cwiseQuotient(w.d);
  for (std::size_t b = 0; b < u.psd.size(); ++b) v.psd.push_back(w.Rinv[b].transpose() * u.psd[b] * w.Rinv[b]);
  return v;
}

ConeVec lambda_vec(const Scaling& w) {
  ConeVec v;
  v.lp = w.lam_lp;
  for (const auto& l : w.lam) v.psd.push_back(l.asDiagonal().toDenseMatrix());
  return v;
}

// lambda o lambda
ConeVec lambda_sq(const Scaling& w) {
  ConeVec v;
  v.lp = w.lam_lp.cwiseAbs2();
  for (const auto& l : w.lam) v.psd.push_back(l.cwiseAbs2().asDiagonal().toDenseMatrix());
  return v;
}

// lambda^-1 o u
ConeVec lambda_inv_prod(const Scaling& w, const ConeVec& u) {
  ConeVec v;
  v.lp = u.lp.cwiseQuotient(w.lam_lp);
  for (std::size_t b = 0; b < u.psd.size(); ++b) {
    const RVec& l = w.lam[b];
    RMat m = u.psd[b];
    for (int j = 0; j < m.cols(); ++j)
      for (int i = 0; i < m.rows(); ++i) m(i, j) = 2.0 * m(i, j) / (l[i] + l[j]);
    v.psd.push_back(std::move(m));
  }
  return v;
}

// Jordan product a o b
ConeVec jordan(const ConeVec& a, const ConeVec& b) {
  ConeVec v;
  v.lp = a.lp.cwiseProduct(b.lp);
  for (std::size_t i = 0; i < a.psd.size(); ++i) {
    const RMat ab = a.psd[i] * b.psd[i];
    v.psd.push_back(0.5 * (ab + ab.transpose()));
  }
  return v;
}

// Largest alpha with lambda + alpha * d in the cone (inf when unbounded).
double max_step(const Scaling& w, const ConeVec& d) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.lp.size(); ++i)
    if (d.lp[i] < 0) a = std::min(a, w.lam_lp[i] / -d.lp[i]);
  for (std::size_t b = 0; b < d.psd.size(); ++b) {
    const RVec isq = w.lam[b].cwiseSqrt().cwiseInverse();
    const RMat m = isq.asDiagonal() * d.psd[b] * isq.asDiagonal();
    const double g = min_eig_sym(0.5 * (m + m.transpose()));
    if (g < 0) a = std::min(a, -1.0 / g);
  }
  return a;
}

// Moves lambda by alpha along the scaled directions and refreshes the scaling.
bool update_scaling(Scaling& w, const ConeVec& ds, const ConeVec& dz, double alpha) {
  // LP part in original coordinates.
  if (w.lam_lp.size()) {
    const RVec s = w.d.cwiseProduct(w.lam_lp + alpha * ds.lp);
    const RVec z = (w.lam_lp + alpha * dz.lp).cwiseQuotient(w.d);
    if (s.minCoeff() <= 0 || z.minCoeff() <= 0) return false;
    w.d = (s.array() / z.array()).sqrt();
    w.lam_lp = (s.array() * z.array()).sqrt();
  }
  for (std::size_t b = 0; b < w.lam.size(); ++b) {
    const RMat L = w.lam[b].asDiagonal();
    RMat st = L + alpha * ds.psd[b];
    RMat zt = L + alpha * dz.psd[b];
    st = 0.5 * (st + st.transpose()).eval();
    zt = 0.5 * (zt + zt.transpose()).eval();
    RMat Rt, Rtinv;
    RVec lam;
    if (!nt_block(st, zt, Rt, Rtinv, lam)) return false;
    w.R[b] = w.R[b] * Rt;
    w.Rinv[b] = Rtinv * w.Rinv[b];
    w.lam[b] = lam;
  }
  return true;
}

// s = W^T lambda, z = W^-1 lambda
void iterates_from_scaling(const Scaling& w, ConeVec& s, ConeVec& z) {
  const ConeVec l = lambda_vec(w);
  s = scale_t(w, l);
  z = scale_inv(w, l);
  for (auto& m : s.psd) m = 0.5 * (m + m.transpose()).eval();
  for (auto& m : z.psd) m = 0.5 * (m + m.transpose()).eval();
}

// ---------------------------------------------------------------------------
// Nonzeros of each PSD column; empty when the column is dense. Coordinate
// matrices of matrix variables carry at most four entries.
struct SparseEntry {
  int i, j;
  double v;
};
using ColumnPatterns = std::vector<std::vector<std::vector<SparseEntry>>>;

ColumnPatterns column_patterns(const RealConeProblem& p) {
  constexpr int kMaxSparse = 8;
  ColumnPatterns out(p.psd.size());
  for (std::size_t bi = 0; bi < p.psd.size(); ++bi) {
    const auto& b = p.psd[bi];
    out[bi].resize(b.cols.size());
    for (std::size_t t = 0; t < b.cols.size(); ++t) {
      std::vector<SparseEntry> e;
      const RMat& g = b.G[t];
      for (int j = 0; j < b.size && static_cast<int>(e.size()) <= kMaxSparse; ++j)
        for (int i = 0; i < b.size; ++i)
          if (g(i, j) != 0.0) e.push_back({i, j, g(i, j)});
      if (static_cast<int>(e.size()) <= kMaxSparse) out[bi][t] = std::move(e);
    }
  }
  return out;
}

// KKT system  G^T dz = ux,  G dx - W^T W dz = uz, solved through the
// Schur complement H = Gt^T Gt with Gt = W^-T G.

class Kkt {
 public:
  Kkt(const RealConeProblem& p, const ColumnPatterns& pat, const Scaling& w, int refinement)
      : p_(p), pat_(pat), w_(w), refinement_(refinement) {}

  bool factor() {
    const int n = p_.n;
    RMat H = RMat::Zero(n, n);
    if (p_.lp_rows()) {
      Glp_ = w_.d.cwiseInverse().asDiagonal() * p_.G_lp;
      H.noalias() += Glp_.transpose() * Glp_;
    }
    Gt_.assign(p_.psd.size(), {});
    for (std::size_t bi = 0; bi < p_.psd.size(); ++bi) {
      const auto& b = p_.psd[bi];
      const auto& pat = pat_[bi];
      auto& gt = Gt_[bi];
      gt.resize(b.cols.size());
      const RMat& Ri = w_.Rinv[bi];
      for (std::size_t t = 0; t < b.cols.size(); ++t) {
        if (pat[t].empty()) {
          gt[t].noalias() = Ri * b.G[t] * Ri.transpose();
          continue;
        }
        gt[t] = RMat::Zero(b.size, b.size);
        for (const auto& e : pat[t]) gt[t].noalias() += e.v * Ri.col(e.i) * Ri.col(e.j).transpose();
      }
      // Sparse pairs: Tr(G_t S G_u S) with S = Ri^T Ri, no b^2 sweep.
      const RMat S = Ri.transpose() * Ri;
      const std::size_t len = static_cast<std::size_t>(b.size) * b.size;
      for (std::size_t t = 0; t < b.cols.size(); ++t) {
        const int it = b.cols[t];
        for (std::size_t u = t; u < b.cols.size(); ++u) {
          double v = 0;
          if (!pat[t].empty() && !pat[u].empty()) {
            for (const auto& x : pat[t])
              for (const auto& y : pat[u]) v += x.v * y.v * S(x.j, y.i) * S(y.j, x.i);
          } else {
            v = kernels::dot(gt[t].data(), gt[u].data(), len);
          }
          const int iu = b.cols[u];
          H(it, iu) += v;
          if (iu != it) H(iu, it) += v;
        }
      }
    }
    llt_.compute(H);
    if (llt_.info() == Eigen::Success) return true;
    const double reg = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    llt_.compute(H + reg * RMat::Identity(n, n));
    return llt_.info() == Eigen::Success;
  }

  // Returns dx and the scaled dz (W dz).
  void solve(const RVec& ux, const ConeVec& uz, RVec& dx, ConeVec& dzt) const {
    const ConeVec ut = scale_inv_t(w_, uz);
    const RVec rhs = ux + GtT(ut);
    dx = normal_solve(rhs);
    for (int r = 0; r < refinement_; ++r) {
      const RVec res = rhs - GtT(Gt(dx));
      dx += normal_solve(res);
    }
    dzt = Gt(dx);
    caxpy(-1.0, ut, dzt);
  }

  RVec normal_solve(const RVec& b) const { return llt_.solve(b); }

  ConeVec Gt(const RVec& x) const {
    ConeVec v;
    v.lp = p_.lp_rows() ? RVec(Glp_ * x) : RVec();
    for (std::size_t bi = 0; bi < p_.psd.size(); ++bi) {
      const auto& b = p_.psd[bi];
      RMat m = RMat::Zero(b.size, b.size);
      for (std::size_t t = 0; t < b.cols.size(); ++t) {
        const double xi = x[b.cols[t]];
        if (xi != 0.0) kernels::axpy(xi, Gt_[bi][t].data(), m.data(), static_cast<std::size_t>(m.size()));
      }
      v.psd.push_back(std::move(m));
    }
    return v;
  }

  RVec GtT(const ConeVec& z) const {
    RVec r = p_.lp_rows() ? RVec(Glp_.transpose() * z.lp) : RVec(RVec::Zero(p_.n));
    for (std::size_t bi = 0; bi < p_.psd.size(); ++bi) {
      const auto& b = p_.psd[bi];
      for (std::size_t t = 0; t < b.cols.size(); ++t) r[b.cols[t]] += mat_dot(Gt_[bi][t], z.psd[bi]);
    }
    return r;
  }

 private:
  const RealConeProblem& p_;
  const ColumnPatterns& pat_;
  const Scaling& w_;
  int refinement_;
  RMat Glp_;
  std::vector<std::vector<RMat>> Gt_;
  Eigen::LLT<RMat> llt_;
};

// Shifts v into the cone interior when it is not already well inside.
void shift_into_cone(ConeVec& v) {
  double t = 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < v.lp.size(); ++i) {
    t = any ? std::max(t, -v.lp[i]) : -v.lp[i];
    any = true;
  }
  for (const auto& m : v.psd) {
    const double g = -min_eig_sym(m);
    t = any ? std::max(t, g) : g;
    any = true;
  }
  if (!any) return;
  const double nrm = cnorm(v);
  if (t >= -1e-8 * std::max(nrm, 1.0)) {
    v.lp.array() += 1.0 + t;
    for (auto& m : v.psd) m.diagonal().array() += 1.0 + t;
  }
}

struct Iterate {
  RVec x;
  ConeVec s, z;
  double tau = 1, kappa = 1;
};

ConeSolution finish(const Equilibration& e, const Iterate& it, ConeStatus status, int iters, double pres, double dres,
                    double relgap, const std::string& msg) {
  const RealConeProblem& p = e.p;
  ConeSolution out;
  out.status = status;
  out.iterations = iters;
  out.primal_residual = pres;
  out.dual_residual = dres;
  out.relative_gap = relgap;
  out.message = msg;
  if (status == ConeStatus::optimal) {
    const double tau = it.tau;
    out.x = e.theta_h * e.col.cwiseProduct(it.x) / tau;
    out.s_lp = e.theta_h * it.s.lp.cwiseQuotient(e.row) / tau;
    out.z_lp = e.theta_c * it.z.lp.cwiseProduct(e.row) / tau;
    for (std::size_t b = 0; b < p.psd.size(); ++b) {
      const RVec ei = e.blk[b].cwiseInverse();
      out.s_psd.push_back(e.theta_h * (ei.asDiagonal() * it.s.psd[b] * ei.asDiagonal()) / tau);
      out.z_psd.push_back(e.theta_c * (e.blk[b].asDiagonal() * it.z.psd[b] * e.blk[b].asDiagonal()) / tau);
    }
    const double scale = e.theta_c * e.theta_h / tau;
    out.primal_objective = scale * p.c.dot(it.x);
    double hz = p.h_lp.dot(it.z.lp);
    for (std::size_t b = 0; b < p.psd.size(); ++b) hz += mat_dot(p.psd[b].h, it.z.psd[b]);
    out.dual_objective = -scale * hz;
  } else if (status == ConeStatus::primal_infeasible) {
    // Certificate z with h^T z = -1 and G^T z ~ 0, in original coordinates.
    double hz = p.h_lp.dot(it.z.lp);
    for (std::size_t b = 0; b < p.psd.size(); ++b) hz += mat_dot(p.psd[b].h, it.z.psd[b]);
    const double f = hz < 0 ? -1.0 / hz : 1.0;
    out.z_lp = f * it.z.lp.cwiseProduct(e.row) / e.theta_h;
    for (std::size_t b = 0; b < p.psd.size(); ++b)
      out.z_psd.push_back(f * (e.blk[b].asDiagonal() * it.z.psd[b] * e.blk[b].asDiagonal()) / e.theta_h);
  }
  return out;
}

}  // namespace

ConeSolution InteriorPointBackend::solve(const RealConeProblem& problem, const SolverOptions& opt) const {
  problem.validate();
  const Equilibration eq = equilibrate(problem, opt.equilibration_passes);
  const RealConeProblem& p = eq.p;
  const Ops ops{p};
  const int n = p.n;
  const double m = ops.degree();

  if (n == 0) {
    ConeSolution out;
    out.status = ConeStatus::numerical_failure;
    out.message = "empty program";
    return out;
  }

  const ConeVec h = ops.h();
  const ColumnPatterns pat = column_patterns(p);
  const double resx0 = std::max(1.0, p.c.norm());
  const double resz0 = std::max(1.0, cnorm(h));

  // Starting point: least-squares x with s = h - Gx, minimum-norm z with
  // G^T z = -c, both pushed into the interior.
  Iterate it;
  {
    Scaling unit;
    unit.d = RVec::Ones(p.lp_rows());
    unit.lam_lp = RVec::Ones(p.lp_rows());
    for (const auto& b : p.psd) {
      unit.R.push_back(RMat::Identity(b.size, b.size));
      unit.Rinv.push_back(RMat::Identity(b.size, b.size));
      unit.lam.push_back(RVec::Ones(b.size));
    }
    Kkt k0(p, pat, unit, opt.refinement);
    if (!k0.factor()) {
      ConeSolution out;
      out.status = ConeStatus::numerical_failure;
      out.message = "constraint matrix is rank deficient";
      return out;
    }
    RVec x;
    ConeVec zt;
    k0.solve(RVec::Zero(n), h, x, zt);  // zt = Gx - h
    it.x = x;
    it.s = cscaled(zt, -1.0);
    shift_into_cone(it.s);
    RVec x2;
    ConeVec z2;
    k0.solve(-p.c, ops.zeros(), x2, z2);  // z2 = G x2 with G^T z2 = -c
    it.z = z2;
    shift_into_cone(it.z);
  }

  Scaling w;
  if (!initial_scaling(ops, it.s, it.z, w)) {
    ConeSolution out;
    out.status = ConeStatus::numerical_failure;
    out.message = "initial scaling failed";
    return out;
  }
  iterates_from_scaling(w, it.s, it.z);

  // Best point meeting the loose optimality targets, kept as a fallback.
  bool have_loose = false;
  Iterate loose;
  double loose_score = std::numeric_limits<double>::infinity();
  double lp_res = 0, ld_res = 0, l_gap = 0;

  double pres = 0, dres = 0, relgap = 0;
  std::string failure = "iteration limit";
  const bool trace = std::getenv("FDSEC_IPM_TRACE") != nullptr;
  int iter = 0;
  for (; iter <= opt.max_iterations; ++iter) {
    const ConeVec Gx = ops.G(it.x);
    const RVec Gtz = ops.GT(it.z);
    const double cx = p.c.dot(it.x);
    const double hz = cdot(h, it.z);
    const double gap = cdot(it.s, it.z);

    const RVec rx = Gtz + it.tau * p.c;
    ConeVec rz = it.s;
    caxpy(1.0, Gx, rz);
    caxpy(-it.tau, h, rz);
    const double rt = it.kappa + cx + hz;

    const double pcost = cx / it.tau;
    const double dcost = -hz / it.tau;
    const double true_gap = gap / (it.tau * it.tau);
    pres = cnorm(rz) / it.tau / resz0;
    dres = rx.norm() / it.tau / resx0;
    relgap = pcost < 0 ? true_gap / -pcost : (dcost > 0 ? true_gap / dcost : std::numeric_limits<double>::infinity());

    if (trace)
      std::fprintf(stderr, "%3d pcost %+.6e dcost %+.6e gap %.1e pres %.1e dres %.1e tau %.1e kappa %.1e\n", iter, pcost,
                   dcost, true_gap, pres, dres, it.tau, it.kappa);
    if (pres <= opt.feastol && dres <= opt.feastol && (true_gap <= opt.abstol || relgap <= opt.reltol))
      return finish(eq, it, ConeStatus::optimal, iter, pres, dres, relgap, "");

    if (hz < 0) {
      const double pinf = Gtz.norm() / resx0 / -hz;
      if (pinf <= opt.feastol)
        return finish(eq, it, ConeStatus::primal_infeasible, iter, pres, dres, relgap, "");
    }
    if (cx < 0) {
      ConeVec sg = it.s;
      caxpy(1.0, Gx, sg);
      const double dinf = cnorm(sg) / resz0 / -cx;
      if (dinf <= opt.feastol)
        return finish(eq, it, ConeStatus::dual_infeasible, iter, pres, dres, relgap, "");
    }

    // Dual residual relative to the multiplier size; large duals leave an
    // absolute floor of roughly eps * |z| that no step can remove.
    const double dres_rel = rx.norm() / (it.tau * resx0 + cnorm(it.z));
    if (pres <= opt.loose_feastol && dres_rel <= opt.loose_feastol &&
        (true_gap <= opt.abstol || relgap <= opt.loose_reltol)) {
      const double score = std::max({pres, dres_rel, std::min(relgap, 1.0) * 1e-2});
      if (score < loose_score) {
        loose_score = score;
        loose = it;
        have_loose = true;
        lp_res = pres;
        ld_res = dres;
        l_gap = relgap;
      }
    } else if (have_loose && std::max(pres, dres_rel) > 1e3 * loose_score) {
      failure = "diverged after loose point";
      break;
    }
    if (iter == opt.max_iterations) break;
    // Homogeneous scale gone: accept the ray as a certificate at the
    // pipeline feasibility tolerance, otherwise give up.
    if (it.tau < 1e-10 * std::max(1.0, it.kappa)) {
      if (hz < 0 && Gtz.norm() / resx0 / -hz <= opt.weak_certificate_tol)
        return finish(eq, it, ConeStatus::primal_infeasible, iter, pres, dres, relgap, "weak certificate");
      failure = "ill-posed (tau vanished)";
      break;
    }

    const double mu = (gap + it.tau * it.kappa) / (m + 1.0);

    Kkt kkt(p, pat, w, opt.refinement);
    if (!kkt.factor()) {
      failure = "KKT factorization failed";
      break;
    }
    RVec dx1;
    ConeVec dz1;
    kkt.solve(-p.c, h, dx1, dz1);
    const ConeVec ht = scale_inv_t(w, h);
    const double denom_base = p.c.dot(dx1) + cdot(ht, dz1) - it.kappa / it.tau;

    const ConeVec lam = lambda_vec(w);
    const ConeVec lsq = lambda_sq(w);

    struct Dir {
      RVec dx;
      ConeVec ds, dz;
      double dtau = 0, dkappa = 0;
    };

    auto direction = [&](double eta, const ConeVec& rhs4, double rhs5) {
      Dir d;
      const ConeVec dst = lambda_inv_prod(w, rhs4);
      const RVec bx = -(1.0 - eta) * rx;
      ConeVec bz = cscaled(rz, -(1.0 - eta));
      caxpy(-1.0, scale_t(w, dst), bz);
      const double bt = -(1.0 - eta) * rt;
      RVec dx2;
      ConeVec dz2;
      kkt.solve(bx, bz, dx2, dz2);
      d.dtau = (bt - rhs5 / it.tau - p.c.dot(dx2) - cdot(ht, dz2)) / denom_base;
      d.dx = dx2 + d.dtau * dx1;
      d.dz = dz2;
      caxpy(d.dtau, dz1, d.dz);
      d.ds = dst;
      caxpy(-1.0, d.dz, d.ds);
      d.dkappa = (rhs5 - it.kappa * d.dtau) / it.tau;
      return d;
    };

    auto step_limit = [&](const Dir& d) {
      double a = std::min(max_step(w, d.ds), max_step(w, d.dz));
      if (d.dtau < 0) a = std::min(a, it.tau / -d.dtau);
      if (d.dkappa < 0) a = std::min(a, it.kappa / -d.dkappa);
      return a;
    };

    // Predictor
    const Dir aff = direction(0.0, cscaled(lsq, -1.0), -it.tau * it.kappa);
    const double alpha_aff = std::min(1.0, step_limit(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // Corrector
    ConeVec rhs4 = cscaled(lsq, -1.0);
    caxpy(sigma * mu, ops.identity(), rhs4);
    caxpy(-1.0, jordan(aff.ds, aff.dz), rhs4);
    const double rhs5 = -it.tau * it.kappa + sigma * mu - aff.dtau * aff.dkappa;
    const Dir dir = direction(sigma, rhs4, rhs5);
    const double amax = step_limit(dir);
    const double alpha = std::min(1.0, 0.99 * amax);
    if (!(alpha > 1e-12) || !dir.dx.allFinite()) {
      failure = "step length collapsed";
      break;
    }

    it.x += alpha * dir.dx;
    it.tau += alpha * dir.dtau;
    it.kappa += alpha * dir.dkappa;
    if (!update_scaling(w, dir.ds, dir.dz, alpha)) {
      failure = "scaling update failed";
      break;
    }
    iterates_from_scaling(w, it.s, it.z);
    (void)lam;
  }

  if (have_loose) return finish(eq, loose, ConeStatus::optimal, iter, lp_res, ld_res, l_gap, "loose tolerance");

  // Late infeasibility evidence at the loose level.
  {
    const double hz = cdot(h, it.z);
    if (hz < 0 && ops.GT(it.z).norm() / resx0 / -hz <= opt.loose_feastol)
      return finish(eq, it, ConeStatus::primal_infeasible, iter, pres, dres, relgap, "loose certificate");
  }
  return finish(eq, it, ConeStatus::numerical_failure, iter, pres, dres, relgap, failure);
}

}  // namespace fdsec
