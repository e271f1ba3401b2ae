#pragma once
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace fdsec {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kTolHerm = 1e-9;
inline constexpr double kRankOneRatio = 1e-6;

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(int n) : m_(CMat::Zero(n, n)) {}

  // Throws ValidationError if a is not square or not Hermitian within tol.
  // The stored matrix is (a + a^H) / 2.
  static HermitianMatrix from(const CMat& a, double tol = kTolHerm);
  // Symmetrizes without checking.
  static HermitianMatrix symmetrized(const CMat& a);
  static HermitianMatrix identity(int n);
  static HermitianMatrix outer(const CVec& w);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }
  cd operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;

 private:
  CMat m_;
};

struct HermitianEig {
  RVec values;   // descending
  CMat vectors;  // column i pairs with values[i]
};

bool is_hermitian(const CMat& a, double tol = kTolHerm);

// [[Re A, -Im A], [Im A, Re A]]
RMat real_embed(const HermitianMatrix& a);
RMat real_embed(const CMat& a);
// Inverse of real_embed for the top-left/bottom-left blocks.
CMat complex_from_embed(const RMat& r);

HermitianEig eig_hermitian(const HermitianMatrix& a);
double min_eigenvalue(const HermitianMatrix& a);
bool is_psd(const HermitianMatrix& a, double tol);

double frobenius_norm(const CMat& a);
double spectral_norm(const CMat& a);

// lambda_2 / lambda_1 of the spectrum; 0 for matrices of rank <= 1 or zero.
double rank_ratio(const HermitianMatrix& a);
bool is_rank_one(const HermitianMatrix& a, double ratio = kRankOneRatio);
int rank_estimate(const HermitianMatrix& a, double tol);

// Principal eigenvector scaled so |w|^2 = Tr(A), first nonzero entry real >= 0.
CVec principal_vector(const HermitianMatrix& a);
// Rotates w so its first entry with magnitude above tol is real nonnegative.
CVec canonical_phase(const CVec& w, double tol = 1e-12);

}  // namespace fdsec
