#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fdsec/hermitian.hpp"

namespace fdsec {

struct SystemConfig {
  int K = 3;    // DL users
  int J = 7;    // UL users
  int M = 2;    // eavesdroppers
  int N_T = 10;  // BS antennas
  int N_R = 2;  // antennas per eavesdropper
  double gamma_dl_req_db = 10.0;
  double gamma_ul_req_db = 5.0;
  double r_tol_dl = 1.0;  // bit/s/Hz
  double r_tol_ul = 1.0;
  double rho_db = -80.0;
  double sigma_dl_dbm = -100.0;
  double sigma_ul_dbm = -110.0;
  double sigma_eve_dbm = -100.0;
  double antenna_gain_dbi = 10.0;
  double kappa_est_sq = 0.05;
  double path_loss_exponent = 3.6;
  double ref_distance_m = 30.0;
  double max_distance_m = 600.0;
  double carrier_hz = 1.9e9;
  double bandwidth_hz = 200e3;
  double rician_factor_db = 5.0;

  // Reference values with the full user population.
  static SystemConfig full_defaults();
  // Reduced population used by the CLI when no config file is given.
  static SystemConfig desk_defaults();

  void validate() const;

  double gamma_dl() const;
  double gamma_ul() const;
  double rho() const;
  double sigma_dl() const;
  double sigma_ul() const;
  double sigma_eve() const;
  double xi_dl() const { return std::exp2(r_tol_dl) - 1.0; }
  double xi_ul() const { return std::exp2(r_tol_ul) - 1.0; }
};

// Flat "key = value" file; '#' starts a comment. Missing keys keep the
// reference defaults, unknown keys are an error.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text);
std::string format_config(const SystemConfig& c);

double dbm_to_watt(double dbm);
double db_to_linear(double db);

struct ChannelRealization {
  std::vector<CVec> h;                    // [K], N_T
  std::vector<CVec> g;                    // [J], N_T
  CMat H_SI;                              // N_T x N_T
  std::vector<std::vector<cd>> f_true;    // [J][K]
  std::vector<std::vector<cd>> f_hat;     // [J][K]
  std::vector<CMat> L_true;               // [M], N_T x N_R
  std::vector<CMat> L_hat;                // [M]
  std::vector<std::vector<CVec>> e_true;  // [J][M], N_R
  std::vector<std::vector<CVec>> e_hat;   // [J][M]
  std::vector<std::vector<double>> eps_cci;  // [J][K]
  std::vector<double> eps_dl;                // [M]
  std::vector<std::vector<double>> eps_ul;   // [J][M]

  int K() const { return static_cast<int>(h.size()); }
  int J() const { return static_cast<int>(g.size()); }
  int M() const { return static_cast<int>(L_hat.size()); }
  int N_T() const { return static_cast<int>(H_SI.rows()); }

  // Stacked CCI radius at DL user k: sqrt(sum_j eps_cci[j][k]^2).
  double eps_k(int k) const;
  CVec f_hat_vec(int k) const;
  CVec f_true_vec(int k) const;
};

// Deterministic in (config, seed). The error direction of every estimate is
// drawn independently of kappa, so drops generated at different kappa with
// the same seed have nested uncertainty balls.
ChannelRealization generate_drop(const SystemConfig& config, std::uint64_t seed);

// Path loss in dB at distance d (meters), free-space loss at the reference distance.
double path_loss_db(const SystemConfig& c, double d);

}  // namespace fdsec
