#include "fdsec/scenario.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "fdsec/errors.hpp"

namespace fdsec {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SystemConfig SystemConfig::full_defaults() { return SystemConfig{}; }

SystemConfig SystemConfig::desk_defaults() {
  SystemConfig c;
  c.K = 2;
  c.J = 3;
  c.M = 1;
  c.N_T = 6;
  c.N_R = 2;
  return c;
}

double SystemConfig::gamma_dl() const { return db_to_linear(gamma_dl_req_db); }
double SystemConfig::gamma_ul() const { return db_to_linear(gamma_ul_req_db); }
double SystemConfig::rho() const { return db_to_linear(rho_db); }
double SystemConfig::sigma_dl() const { return dbm_to_watt(sigma_dl_dbm); }
double SystemConfig::sigma_ul() const { return dbm_to_watt(sigma_ul_dbm); }
double SystemConfig::sigma_eve() const { return dbm_to_watt(sigma_eve_dbm); }

void SystemConfig::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("config: " + m); };
  if (K < 1) fail("K must be >= 1");
  if (J < 0) fail("J must be >= 0");
  if (M < 0) fail("M must be >= 0");
  if (N_T <= 1) fail("N_T must be > 1");
  if (N_R < 1) fail("N_R must be >= 1");
  if (N_T < J) fail("N_T must be >= J");
  if (N_T <= N_R) fail("N_T must be > N_R");
  const double finite_fields[] = {gamma_dl_req_db, gamma_ul_req_db, r_tol_dl,       r_tol_ul,
                                  rho_db,          sigma_dl_dbm,    sigma_ul_dbm,   sigma_eve_dbm,
                                  antenna_gain_dbi, kappa_est_sq,   path_loss_exponent,
                                  ref_distance_m,  max_distance_m,  carrier_hz,     bandwidth_hz,
                                  rician_factor_db};
  for (double v : finite_fields)
    if (!std::isfinite(v)) fail("non-finite value");
  if (r_tol_dl <= 0 || r_tol_ul <= 0) fail("tolerable leakage rates must be > 0");
  if (rho() >= 1.0) fail("rho must be << 1 (negative dB)");
  if (kappa_est_sq < 0) fail("kappa_est_sq must be >= 0");
  if (kappa_est_sq >= 1) fail("kappa_est_sq must be < 1");
  if (path_loss_exponent <= 0) fail("path_loss_exponent must be > 0");
  if (ref_distance_m <= 0 || max_distance_m < ref_distance_m) fail("need 0 < ref_distance_m <= max_distance_m");
  if (carrier_hz <= 0 || bandwidth_hz <= 0) fail("carrier and bandwidth must be > 0");
}

namespace {

struct Field {
  std::function<void(SystemConfig&, double)> set;
  std::function<double(const SystemConfig&)> get;
  bool integer;
};

const std::vector<std::pair<std::string, Field>>& fields() {
#define FDSEC_INT(name) \
  {#name, Field{[](SystemConfig& c, double v) { c.name = static_cast<int>(v); }, [](const SystemConfig& c) { return double(c.name); }, true}}
#define FDSEC_REAL(name) \
  {#name, Field{[](SystemConfig& c, double v) { c.name = v; }, [](const SystemConfig& c) { return c.name; }, false}}
  static const std::vector<std::pair<std::string, Field>> f = {
      FDSEC_INT(K), FDSEC_INT(J), FDSEC_INT(M), FDSEC_INT(N_T), FDSEC_INT(N_R),
      FDSEC_REAL(gamma_dl_req_db), FDSEC_REAL(gamma_ul_req_db), FDSEC_REAL(r_tol_dl),
      FDSEC_REAL(r_tol_ul), FDSEC_REAL(rho_db), FDSEC_REAL(sigma_dl_dbm), FDSEC_REAL(sigma_ul_dbm),
      FDSEC_REAL(sigma_eve_dbm), FDSEC_REAL(antenna_gain_dbi), FDSEC_REAL(kappa_est_sq),
      FDSEC_REAL(path_loss_exponent), FDSEC_REAL(ref_distance_m), FDSEC_REAL(max_distance_m),
      FDSEC_REAL(carrier_hz), FDSEC_REAL(bandwidth_hz), FDSEC_REAL(rician_factor_db)};
#undef FDSEC_INT
#undef FDSEC_REAL
  return f;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  SystemConfig c = SystemConfig::full_defaults();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& [name, f] : fields())
      if (name == key) field = &f;
    if (!field) throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    double v = 0;
    std::size_t used = 0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size())
      throw ValidationError("config line " + std::to_string(lineno) + ": bad number '" + val + "'");
    if (field->integer && v != std::floor(v))
      throw ValidationError("config line " + std::to_string(lineno) + ": '" + key + "' must be an integer");
    field->set(c, v);
  }
  c.validate();
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SystemConfig& c) {
  std::ostringstream out;
  out.precision(9);
  for (const auto& [name, f] : fields()) out << name << " = " << f.get(c) << "\n";
  return out.str();
}

double path_loss_db(const SystemConfig& c, double d) {
  constexpr double kLightSpeed = 299792458.0;
  const double d_eff = std::max(d, c.ref_distance_m);
  const double fspl = 20.0 * std::log10(4.0 * std::numbers::pi * c.ref_distance_m * c.carrier_hz / kLightSpeed);
  return fspl + 10.0 * c.path_loss_exponent * std::log10(d_eff / c.ref_distance_m);
}

double ChannelRealization::eps_k(int k) const {
  double s = 0;
  for (int j = 0; j < J(); ++j) s += eps_cci[j][k] * eps_cci[j][k];
  return std::sqrt(s);
}

CVec ChannelRealization::f_hat_vec(int k) const {
  CVec f(J());
  for (int j = 0; j < J(); ++j) f[j] = f_hat[j][k];
  return f;
}

CVec ChannelRealization::f_true_vec(int k) const {
  CVec f(J());
  for (int j = 0; j < J(); ++j) f[j] = f_true[j][k];
  return f;
}

namespace {

enum Group : std::uint32_t {
  kPosDl = 1, kPosUl, kPosEve, kFadeH, kFadeG, kFadeF, kFadeL, kFadeE, kFadeSI,
  kErrCci, kErrDl, kErrUl
};

std::mt19937_64 stream(std::uint64_t seed, Group g) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(g)};
  return std::mt19937_64(seq);
}

using Point = std::array<double, 2>;

Point draw_position(std::mt19937_64& rng, const SystemConfig& c) {
  std::uniform_real_distribution<double> dist(c.ref_distance_m, c.max_distance_m);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const double d = dist(rng);
  const double a = ang(rng);
  return {d * std::cos(a), d * std::sin(a)};
}

double norm2d(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// CN(0, 1)
cd cn(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

CMat cn_mat(std::mt19937_64& rng, int r, int c) {
  CMat m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = cn(rng);
  return m;
}

// Uniform point in the unit ball of C^n (real dimension 2n).
CMat unit_ball_draw(std::mt19937_64& rng, int r, int c) {
  CMat d = cn_mat(rng, r, c);
  const double nrm = d.norm();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double radius = std::pow(u(rng), 1.0 / (2.0 * r * c));
  if (nrm == 0.0) return CMat::Zero(r, c);
  return d * (radius / nrm);
}

}  // namespace

ChannelRealization generate_drop(const SystemConfig& c, std::uint64_t seed) {
  c.validate();
  const int K = c.K, J = c.J, M = c.M, NT = c.N_T, NR = c.N_R;
  const double gain_db = c.antenna_gain_dbi;
  auto amp = [&](double d, bool bs_link) {
    return std::sqrt(db_to_linear(-path_loss_db(c, d) + (bs_link ? gain_db : 0.0)));
  };
  const Point origin{0.0, 0.0};

  std::vector<Point> pdl, pul, peve;
  {
    auto r = stream(seed, kPosDl);
    for (int k = 0; k < K; ++k) pdl.push_back(draw_position(r, c));
  }
  {
    auto r = stream(seed, kPosUl);
    for (int j = 0; j < J; ++j) pul.push_back(draw_position(r, c));
  }
  {
    auto r = stream(seed, kPosEve);
    for (int m = 0; m < M; ++m) peve.push_back(draw_position(r, c));
  }

  ChannelRealization x;
  {
    auto r = stream(seed, kFadeH);
    for (int k = 0; k < K; ++k) x.h.push_back(amp(norm2d(pdl[k], origin), true) * cn_mat(r, NT, 1).col(0));
  }
  {
    auto r = stream(seed, kFadeG);
    for (int j = 0; j < J; ++j) x.g.push_back(amp(norm2d(pul[j], origin), true) * cn_mat(r, NT, 1).col(0));
  }
  {
    auto r = stream(seed, kFadeF);
    x.f_true.assign(J, std::vector<cd>(K));
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) x.f_true[j][k] = amp(norm2d(pul[j], pdl[k]), false) * cn(r);
  }
  {
    auto r = stream(seed, kFadeL);
    for (int m = 0; m < M; ++m) x.L_true.push_back(amp(norm2d(peve[m], origin), true) * cn_mat(r, NT, NR));
  }
  {
    auto r = stream(seed, kFadeE);
    x.e_true.assign(J, std::vector<CVec>(M));
    for (int j = 0; j < J; ++j)
      for (int m = 0; m < M; ++m) x.e_true[j][m] = amp(norm2d(pul[j], peve[m]), false) * cn_mat(r, NR, 1).col(0);
  }
  {
    // Unit mean power per entry: specular part sqrt(K/(K+1)), diffuse part CN(0, 1/(K+1)).
    auto r = stream(seed, kFadeSI);
    const double kf = db_to_linear(c.rician_factor_db);
    const double los = std::sqrt(kf / (kf + 1.0));
    const double nlos = std::sqrt(1.0 / (kf + 1.0));
    x.H_SI = CMat::Constant(NT, NT, cd(los, 0.0)) + nlos * cn_mat(r, NT, NT);
  }

  const double kappa = std::sqrt(c.kappa_est_sq);
  {
    auto r = stream(seed, kErrCci);
    x.f_hat.assign(J, std::vector<cd>(K));
    x.eps_cci.assign(J, std::vector<double>(K));
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) {
        const double eps = kappa * std::abs(x.f_true[j][k]);
        const cd err = eps * unit_ball_draw(r, 1, 1)(0, 0);
        x.eps_cci[j][k] = eps;
        x.f_hat[j][k] = x.f_true[j][k] - err;
      }
  }
  {
    auto r = stream(seed, kErrDl);
    for (int m = 0; m < M; ++m) {
      const double eps = kappa * x.L_true[m].norm();
      const CMat err = eps * unit_ball_draw(r, NT, NR);
      x.eps_dl.push_back(eps);
      x.L_hat.push_back(x.L_true[m] - err);
    }
  }
  {
    auto r = stream(seed, kErrUl);
    x.e_hat.assign(J, std::vector<CVec>(M));
    x.eps_ul.assign(J, std::vector<double>(M));
    for (int j = 0; j < J; ++j)
      for (int m = 0; m < M; ++m) {
        const double eps = kappa * x.e_true[j][m].norm();
        const CVec err = eps * unit_ball_draw(r, NR, 1).col(0);
        x.eps_ul[j][m] = eps;
        x.e_hat[j][m] = x.e_true[j][m] - err;
      }
  }
  return x;
}

}  // namespace fdsec
