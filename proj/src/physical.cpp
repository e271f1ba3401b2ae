#include "fdsec/physical.hpp"

#include <algorithm>
#include <cmath>

#include "fdsec/errors.hpp"

namespace fdsec {

double AllocationPolicy::q1() const {
  double s = Z.dim() ? Z.trace() : 0.0;
  for (const auto& Wk : W) s += Wk.trace();
  return s;
}

double AllocationPolicy::q2() const {
  double s = 0;
  for (double p : P) s += p;
  return s;
}

ChannelView ChannelView::truth(const ChannelRealization& x) {
  return ChannelView{x.h, x.g, x.H_SI, x.f_true, x.L_true, x.e_true};
}

ChannelView ChannelView::estimate(const ChannelRealization& x) {
  return ChannelView{x.h, x.g, x.H_SI, x.f_hat, x.L_hat, x.e_hat};
}

NoisePowers NoisePowers::from(const SystemConfig& c) {
  return NoisePowers{c.sigma_dl(), c.sigma_ul(), c.sigma_eve(), c.rho()};
}

std::vector<CVec> zf_receivers(const std::vector<CVec>& g) {
  const int J = static_cast<int>(g.size());
  if (J == 0) return {};
  const int NT = static_cast<int>(g[0].size());
  if (J > NT) throw DegenerateChannelError("zf: more UL users than BS antennas");
  CMat Q(NT, J);
  for (int j = 0; j < J; ++j) Q.col(j) = g[j];
  Eigen::JacobiSVD<CMat> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  if (s[J - 1] <= 1e-10 * s[0]) throw DegenerateChannelError("zf: UL channel matrix is rank deficient");
  // Q^+ = V S^-1 U^H; v_j is the conjugate transpose of row j of Q^+.
  const CMat pinv = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  std::vector<CVec> v(J);
  for (int j = 0; j < J; ++j) v[j] = pinv.row(j).adjoint();
  return v;
}

double dl_sinr(int k, const ChannelView& ch, const AllocationPolicy& p, const NoisePowers& n) {
  const CVec& h = ch.h[k];
  const double signal = (h.adjoint() * p.W[k].mat() * h)(0, 0).real();
  double interf = 0;
  for (int r = 0; r < p.K(); ++r)
    if (r != k) interf += (h.adjoint() * p.W[r].mat() * h)(0, 0).real();
  for (int j = 0; j < p.J(); ++j) interf += p.P[j] * std::norm(ch.f[j][k]);
  interf += (h.adjoint() * p.Z.mat() * h)(0, 0).real();
  return signal / (interf + n.sigma_dl);
}

double ul_sinr(int j, const ChannelView& ch, const AllocationPolicy& p, const std::vector<CVec>& v,
               const NoisePowers& n) {
  const CVec& vj = v[j];
  const double signal = p.P[j] * std::norm(ch.g[j].dot(vj));
  double interf = 0;
  for (int i = 0; i < p.J(); ++i)
    if (i != j) interf += p.P[i] * std::norm(ch.g[i].dot(vj));
  CMat tx = p.Z.mat();
  for (const auto& Wk : p.W) tx += Wk.mat();
  const CMat si = ch.H_SI * tx * ch.H_SI.adjoint();
  double si_term = 0;
  for (Eigen::Index i = 0; i < vj.size(); ++i) si_term += std::norm(vj[i]) * si(i, i).real();
  interf += n.rho * si_term + n.sigma_ul * vj.squaredNorm();
  return signal / interf;
}

namespace {

// log2 det(I + X^{-1} S) with X = L^H Z L + sigma I, via Cholesky of X.
double leak_capacity(const CMat& L, const HermitianMatrix& Z, const CMat& S, double sigma) {
  const Eigen::Index nr = L.cols();
  CMat X = L.adjoint() * Z.mat() * L + sigma * CMat::Identity(nr, nr);
  X = 0.5 * (X + X.adjoint()).eval();
  Eigen::LLT<CMat> llt(X);
  // det(I + X^-1 S) = det(I + C^-1 S C^-H) where X = C C^H.
  CMat T = llt.matrixL().solve(S);
  T = llt.matrixL().solve(T.adjoint()).adjoint();
  const CMat A = CMat::Identity(nr, nr) + 0.5 * (T + T.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < nr; ++i) s += std::log2(std::max(es.eigenvalues()[i], 1e-300));
  return std::max(0.0, s);
}

}  // namespace

double dl_eve_capacity(int k, const CMat& L, const AllocationPolicy& p, double sigma_eve) {
  const CMat S = L.adjoint() * p.W[k].mat() * L;
  return leak_capacity(L, p.Z, S, sigma_eve);
}

double ul_eve_capacity(int j, const CMat& L, const CVec& e, const AllocationPolicy& p, double sigma_eve) {
  const CMat S = p.P[j] * (e * e.adjoint());
  return leak_capacity(L, p.Z, S, sigma_eve);
}

SecrecyRates secrecy_rates(const ChannelView& ch, const AllocationPolicy& p, const std::vector<CVec>& v,
                           const NoisePowers& n) {
  SecrecyRates out;
  const int M = static_cast<int>(ch.L.size());
  for (int k = 0; k < p.K(); ++k) {
    const double rate = std::log2(1.0 + dl_sinr(k, ch, p, n));
    double worst = 0;
    for (int m = 0; m < M; ++m) worst = std::max(worst, dl_eve_capacity(k, ch.L[m], p, n.sigma_eve));
    out.dl_rate.push_back(rate);
    out.dl.push_back(std::max(0.0, rate - worst));
  }
  for (int j = 0; j < p.J(); ++j) {
    const double rate = std::log2(1.0 + ul_sinr(j, ch, p, v, n));
    double worst = 0;
    for (int m = 0; m < M; ++m) worst = std::max(worst, ul_eve_capacity(j, ch.L[m], ch.e[j][m], p, n.sigma_eve));
    out.ul_rate.push_back(rate);
    out.ul.push_back(std::max(0.0, rate - worst));
  }
  return out;
}

}  // namespace fdsec
