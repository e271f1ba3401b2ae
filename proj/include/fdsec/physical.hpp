#pragma once
#include <vector>

#include "fdsec/hermitian.hpp"
#include "fdsec/scenario.hpp"

namespace fdsec {

struct AuxiliaryVariables {
  double tau = 0.0;
  std::vector<double> delta;                   // [K]
  std::vector<std::vector<double>> t;          // [K][M]
  std::vector<std::vector<double>> alpha;      // [J][M]
  std::vector<std::vector<double>> beta;       // [J][M]
  std::vector<std::vector<HermitianMatrix>> M_slack;  // [J][M], N_R
};

struct AllocationPolicy {
  std::vector<HermitianMatrix> W;  // [K]
  std::vector<CVec> w;             // [K] when recovered, else empty
  HermitianMatrix Z;
  std::vector<double> P;           // [J], watts
  AuxiliaryVariables aux;

  int K() const { return static_cast<int>(W.size()); }
  int J() const { return static_cast<int>(P.size()); }
  double q1() const;  // sum Tr(W_k) + Tr(Z)
  double q2() const;  // sum P_j
};

// Channels an evaluation runs against. The same code path serves the true
// channels, the estimates, and adversarial samples.
struct ChannelView {
  std::vector<CVec> h;
  std::vector<CVec> g;
  CMat H_SI;
  std::vector<std::vector<cd>> f;         // [J][K]
  std::vector<CMat> L;                    // [M]
  std::vector<std::vector<CVec>> e;       // [J][M]

  static ChannelView truth(const ChannelRealization& x);
  static ChannelView estimate(const ChannelRealization& x);
};

struct NoisePowers {
  double sigma_dl = 0;
  double sigma_ul = 0;
  double sigma_eve = 0;
  double rho = 0;
  static NoisePowers from(const SystemConfig& c);
};

// v_j = (u_j Q^+)^H with Q = [g_1 .. g_J]; v_j^H g_n = delta_jn.
std::vector<CVec> zf_receivers(const std::vector<CVec>& g);

double dl_sinr(int k, const ChannelView& ch, const AllocationPolicy& p, const NoisePowers& n);
double ul_sinr(int j, const ChannelView& ch, const AllocationPolicy& p, const std::vector<CVec>& v,
               const NoisePowers& n);
// log2 det(I + X_m^{-1} L^H W_k L)
double dl_eve_capacity(int k, const CMat& L, const AllocationPolicy& p, double sigma_eve);
// log2 det(I + P_j X_m^{-1} e e^H)
double ul_eve_capacity(int j, const CMat& L, const CVec& e, const AllocationPolicy& p, double sigma_eve);

struct SecrecyRates {
  std::vector<double> dl;  // [K]
  std::vector<double> ul;  // [J]
  std::vector<double> dl_rate;
  std::vector<double> ul_rate;
};

SecrecyRates secrecy_rates(const ChannelView& ch, const AllocationPolicy& p, const std::vector<CVec>& v,
                           const NoisePowers& n);

}  // namespace fdsec
