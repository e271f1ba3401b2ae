#include "fdsec/hermitian.hpp"

#include <algorithm>
#include <cmath>

#include "fdsec/errors.hpp"

namespace fdsec {

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (!a.allFinite()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(a(i, i).imag()) > tol) return false;
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  }
  return true;
}

HermitianMatrix HermitianMatrix::from(const CMat& a, double tol) {
  if (a.rows() != a.cols()) throw ValidationError("hermitian: matrix is not square");
  if (!is_hermitian(a, tol)) throw ValidationError("hermitian: asymmetry exceeds tolerance");
  return symmetrized(a);
}

HermitianMatrix HermitianMatrix::symmetrized(const CMat& a) {
  HermitianMatrix h;
  h.m_ = 0.5 * (a + a.adjoint());
  return h;
}

HermitianMatrix HermitianMatrix::identity(int n) {
  HermitianMatrix h;
  h.m_ = CMat::Identity(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::outer(const CVec& w) { return symmetrized(w * w.adjoint()); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  HermitianMatrix h;
  h.m_ = m_ + o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  HermitianMatrix h;
  h.m_ = m_ - o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  HermitianMatrix h;
  h.m_ = m_ * s;
  return h;
}

RMat real_embed(const CMat& a) {
  const Eigen::Index n = a.rows();
  RMat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = a.real();
  r.topRightCorner(n, n) = -a.imag();
  r.bottomLeftCorner(n, n) = a.imag();
  r.bottomRightCorner(n, n) = a.real();
  return r;
}

RMat real_embed(const HermitianMatrix& a) { return real_embed(a.mat()); }

CMat complex_from_embed(const RMat& r) {
  const Eigen::Index n = r.rows() / 2;
  CMat a(n, n);
  a.real() = 0.5 * (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n));
  a.imag() = 0.5 * (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n));
  return a;
}

HermitianEig eig_hermitian(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat());
  const Eigen::Index n = a.dim();
  HermitianEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen sorts ascending.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double min_eigenvalue(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

bool is_psd(const HermitianMatrix& a, double tol) { return min_eigenvalue(a) >= -tol; }

double frobenius_norm(const CMat& a) { return a.norm(); }

double spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()[0];
}

double rank_ratio(const HermitianMatrix& a) {
  if (a.dim() < 2) return 0.0;
  const HermitianEig e = eig_hermitian(a);
  if (e.values[0] <= 0.0) return 0.0;
  return std::max(0.0, e.values[1]) / e.values[0];
}

bool is_rank_one(const HermitianMatrix& a, double ratio) { return rank_ratio(a) <= ratio; }

int rank_estimate(const HermitianMatrix& a, double tol) {
  const HermitianEig e = eig_hermitian(a);
  if (e.values.size() == 0 || e.values[0] <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > tol * e.values[0]) ++r;
  return r;
}

CVec canonical_phase(const CVec& w, double tol) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double mag = std::abs(w[i]);
    if (mag > tol) return w * (std::conj(w[i]) / mag);
  }
  return w;
}

CVec principal_vector(const HermitianMatrix& a) {
  const HermitianEig e = eig_hermitian(a);
  const double tr = std::max(0.0, a.trace());
  CVec w = e.vectors.col(0) * std::sqrt(tr);
  return canonical_phase(w);
}

}  // namespace fdsec
