#include "fdsec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fdsec/errors.hpp"

namespace fdsec {

namespace {

// splitmix64 finalizer; keys the per-sample generators.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t label_key(std::uint64_t seed, const std::string& label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : label) h = (h ^ ch) * 1099511628211ULL;
  return mix(seed ^ mix(h));
}

// Independent stream per (constraint, sample index): results do not depend
// on how samples are split across workers.
class Draw {
 public:
  Draw(std::uint64_t key, int index) : gen_(mix(key + mix(static_cast<std::uint64_t>(index) + 1))) {}

  // Uniform in the complex n-ball of radius eps, or on its surface.
  CVec ball(int n, double eps, bool surface) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cd(normal_(gen_), normal_(gen_));
    const double nv = v.norm();
    if (nv == 0.0 || eps == 0.0) return CVec::Zero(n);
    const double r = surface ? eps : eps * std::pow(uniform_(gen_), 1.0 / (2.0 * n));
    return v * (r / nv);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

void append(std::vector<double>& out, const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i].real());
    out.push_back(v[i].imag());
  }
}

struct Probe {
  const OracleOptions& o;
  bool stop_early;

  // eval(draw, surface, coords) -> margin; draw is null for the single deterministic evaluation.
  template <class Eval>
  ConstraintReport run(const std::string& label, bool uncertain, Eval&& eval) const {
    ConstraintReport r;
    r.label = label;
    const int n = uncertain ? o.n_samples : 1;
    const int n_surface = static_cast<int>(std::lround(o.boundary_fraction * n));
    const std::uint64_t key = label_key(o.seed, label);
    std::vector<double> coords;
    for (int s = 0; s < n; ++s) {
      coords.clear();
      double m;
      if (uncertain) {
        Draw d(key, s);
        m = eval(&d, s < n_surface, coords);
      } else {
        m = eval(nullptr, false, coords);
      }
      ++r.samples;
      if (m < -o.feas_tol) ++r.violations;
      if (m < r.worst_margin || r.samples == 1) {
        r.worst_margin = m;
        r.worst_sample = coords;
      }
      if (stop_early && r.violations > 0) break;
    }
    return r;
  }
};

AdversarialReport check_impl(const AllocationPolicy& policy, const ChannelRealization& x, const SystemConfig& c,
                             const OracleOptions& o, bool stop_early) {
  if (o.n_samples < 1) throw ValidationError("adversarial_check: n_samples must be positive");
  AdversarialReport rep;
  rep.feas_tol = o.feas_tol;
  const Probe probe{o, stop_early};
  const NoisePowers n = NoisePowers::from(c);
  const ChannelView est = ChannelView::estimate(x);
  const int K = x.K(), J = x.J(), M = x.M();
  const int NT = x.N_T();
  const int NR = M > 0 ? static_cast<int>(x.L_hat[0].cols()) : 0;
  auto failed = [&] { return stop_early && !rep.constraints.empty() && rep.constraints.back().violations > 0; };

  const double gdl = c.gamma_dl();
  for (int k = 0; k < K && !failed(); ++k) {
    bool uncertain = false;
    for (int j = 0; j < J; ++j) uncertain |= x.eps_cci[j][k] > 0;
    ChannelView view = est;
    rep.constraints.push_back(probe.run("C1[k=" + std::to_string(k) + "]", uncertain,
                                        [&](Draw* d, bool surface, std::vector<double>& coords) {
                                          for (int j = 0; j < J; ++j) {
                                            cd delta(0.0, 0.0);
                                            if (d) delta = d->ball(1, x.eps_cci[j][k], surface)[0];
                                            view.f[j][k] = x.f_hat[j][k] + delta;
                                            coords.push_back(delta.real());
                                            coords.push_back(delta.imag());
                                          }
                                          return dl_sinr(k, view, policy, n) / gdl - 1.0;
                                        }));
  }

  if (J > 0 && !failed()) {
    const std::vector<CVec> v = zf_receivers(est.g);
    const double gul = c.gamma_ul();
    for (int j = 0; j < J && !failed(); ++j)
      rep.constraints.push_back(probe.run("C2[j=" + std::to_string(j) + "]", false,
                                          [&](Draw*, bool, std::vector<double>&) {
                                            return ul_sinr(j, est, policy, v, n) / gul - 1.0;
                                          }));
  }

  auto sample_L = [&](Draw* d, int m, bool surface, std::vector<double>& coords) {
    CMat L = x.L_hat[m];
    if (d) {
      const CVec dv = d->ball(NT * NR, x.eps_dl[m], surface);
      L += Eigen::Map<const CMat>(dv.data(), NT, NR);
      append(coords, dv);
    }
    return L;
  };

  for (int k = 0; k < K && !failed(); ++k)
    for (int m = 0; m < M && !failed(); ++m)
      rep.constraints.push_back(probe.run("C3[k=" + std::to_string(k) + ",m=" + std::to_string(m) + "]",
                                          x.eps_dl[m] > 0, [&](Draw* d, bool surface, std::vector<double>& coords) {
                                            const CMat L = sample_L(d, m, surface, coords);
                                            const double cap = dl_eve_capacity(k, L, policy, n.sigma_eve);
                                            return (c.r_tol_dl - cap) / c.r_tol_dl;
                                          }));

  for (int j = 0; j < J && !failed(); ++j)
    for (int m = 0; m < M && !failed(); ++m)
      rep.constraints.push_back(probe.run("C4[j=" + std::to_string(j) + ",m=" + std::to_string(m) + "]",
                                          x.eps_dl[m] > 0 || x.eps_ul[j][m] > 0,
                                          [&](Draw* d, bool surface, std::vector<double>& coords) {
                                            const CMat L = sample_L(d, m, surface, coords);
                                            CVec e = x.e_hat[j][m];
                                            if (d) {
                                              const CVec de = d->ball(NR, x.eps_ul[j][m], surface);
                                              e += de;
                                              append(coords, de);
                                            }
                                            const double cap = ul_eve_capacity(j, L, e, policy, n.sigma_eve);
                                            return (c.r_tol_ul - cap) / c.r_tol_ul;
                                          }));
  return rep;
}

}  // namespace

int AdversarialReport::violations() const {
  int v = 0;
  for (const auto& r : constraints) v += r.violations;
  return v;
}

int AdversarialReport::violations(char family) const {
  int v = 0;
  for (const auto& r : constraints)
    if (r.label.size() > 1 && r.label[1] == family) v += r.violations;
  return v;
}

double AdversarialReport::worst_margin() const {
  const ConstraintReport* w = worst();
  return w ? w->worst_margin : std::numeric_limits<double>::infinity();
}

const ConstraintReport* AdversarialReport::worst() const {
  const ConstraintReport* w = nullptr;
  for (const auto& r : constraints)
    if (!w || r.worst_margin < w->worst_margin) w = &r;
  return w;
}

AdversarialReport adversarial_check(const AllocationPolicy& policy, const ChannelRealization& x,
                                    const SystemConfig& c, const OracleOptions& o) {
  return check_impl(policy, x, c, o, false);
}

std::vector<CVec> direction_net(int n_t, int count) {
  if (n_t < 1 || n_t > 3) throw ValidationError("direction_net: N_T must be 1, 2 or 3");
  if (count < 1) throw ValidationError("direction_net: count must be positive");
  std::vector<CVec> out;
  if (n_t == 1) {
    out.push_back(CVec::Constant(1, cd(1.0, 0.0)));
    return out;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  if (n_t == 2) {
    // Fibonacci lattice on the Bloch sphere; the global phase is irrelevant to w w^H.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double theta = std::acos(z);
      const double phi = two_pi * std::fmod(i / golden, 1.0);
      CVec d(2);
      d << cd(std::cos(theta / 2), 0.0), std::polar(std::sin(theta / 2), phi);
      out.push_back(d);
    }
    return out;
  }
  // N_T = 3: Kronecker sequence in 4 dimensions; squared moduli uniform on the simplex.
  double g = 1.5;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / 5.0);
  double alpha[4];
  for (int i = 0; i < 4; ++i) alpha[i] = std::pow(1.0 / g, i + 1);
  for (int i = 0; i < count; ++i) {
    double u[4];
    for (int a = 0; a < 4; ++a) u[a] = std::fmod(0.5 + alpha[a] * (i + 1), 1.0);
    const double s = std::sqrt(u[0]);
    const double m0 = 1.0 - s, m1 = s * (1.0 - u[1]), m2 = s * u[1];
    CVec d(3);
    d << cd(std::sqrt(m0), 0.0), std::polar(std::sqrt(m1), two_pi * u[2]), std::polar(std::sqrt(m2), two_pi * u[3]);
    out.push_back(d);
  }
  return out;
}

namespace {

// Points inside the balls that tend to maximize leakage. A violation at any of
// them is a genuine violation, so the candidate can be dropped without sampling.
bool leaks_at_probe(const AllocationPolicy& pol, const ChannelRealization& x, const SystemConfig& c, double tol) {
  const double se = c.sigma_eve();
  const CVec& w = pol.w[0];
  for (int m = 0; m < x.M(); ++m) {
    const CMat& L = x.L_hat[m];
    const double eps = x.eps_dl[m];
    std::vector<CMat> Ls{L};
    if (eps > 0) {
      // error aligned with the beam, or shrinking the channel (less noise at the eavesdropper)
      const CVec lw = L.adjoint() * w;
      if (lw.norm() > 0 && w.norm() > 0) Ls.push_back(L + eps * (w / w.norm()) * (lw / lw.norm()).adjoint());
      if (L.norm() > eps) Ls.push_back(L * (1.0 - eps / L.norm()));
    }
    for (const CMat& l : Ls)
      if ((c.r_tol_dl - dl_eve_capacity(0, l, pol, se)) / c.r_tol_dl < -tol) return true;
    for (int j = 0; j < x.J(); ++j) {
      const CVec& e = x.e_hat[j][m];
      const double eu = x.eps_ul[j][m];
      std::vector<CVec> es{e};
      if (eu > 0 && e.norm() > 0) es.push_back(e * (1.0 + eu / e.norm()));
      for (const CMat& l : Ls)
        for (const CVec& ev : es)
          if ((c.r_tol_ul - ul_eve_capacity(j, l, ev, pol, se)) / c.r_tol_ul < -tol) return true;
    }
  }
  return false;
}

}  // namespace

GridBound restricted_grid_bound(const ChannelRealization& x, const SystemConfig& c, const GridOptions& o) {
  const int K = x.K(), J = x.J(), M = x.M(), NT = x.N_T();
  if (K != 1 || J > 1 || M > 1 || NT > 3) throw ValidationError("restricted_grid_bound: instance too large");
  const NoisePowers n = NoisePowers::from(c);
  const ChannelView est = ChannelView::estimate(x);
  const CVec& h = x.h[0];
  const double gdl = c.gamma_dl(), gul = c.gamma_ul();

  // C1: p |h^H d|^2 >= gdl (q |h|^2 + P cf + sigma), cf the worst CCI gain.
  const double cf = J == 1 ? std::pow(std::abs(x.f_hat[0][0]) + x.eps_cci[0][0], 2) : 0.0;

  // C2 (J = 1): P S >= gul (I0 + p Iw(d) + q Iz); interference read off the SINR model.
  double S = 0, I0 = 0, Iz = 0;
  std::vector<CVec> v;
  AllocationPolicy probe;
  probe.W.assign(1, HermitianMatrix(NT));
  probe.Z = HermitianMatrix(NT);
  probe.P.assign(J, 1.0);
  auto interference = [&] { return S / ul_sinr(0, est, probe, v, n); };
  if (J == 1) {
    v = zf_receivers(est.g);
    S = std::norm(est.g[0].dot(v[0]));
    I0 = interference();
    probe.Z = HermitianMatrix::identity(NT);
    Iz = interference() - I0;
    probe.Z = HermitianMatrix(NT);
  }

  const std::vector<CVec> net = direction_net(NT, o.directions);
  std::vector<double> qs{0.0};
  const double q_ref = gdl * n.sigma_dl / h.squaredNorm();
  for (int i = 0; i < o.q_points; ++i) {
    const double t = o.q_points == 1 ? 0.0 : static_cast<double>(i) / (o.q_points - 1);
    qs.push_back(q_ref * std::pow(10.0, o.q_decades_low + t * (o.q_decades_high - o.q_decades_low)));
  }

  struct Candidate {
    double q1, p, q, P;
    int dir;
  };
  std::vector<Candidate> cands;
  for (int di = 0; di < static_cast<int>(net.size()); ++di) {
    const CVec& d = net[di];
    const double hd = std::norm(h.dot(d));
    if (hd <= 1e-14 * h.squaredNorm()) continue;
    double Iw = 0;
    if (J == 1) {
      probe.W[0] = HermitianMatrix::outer(d);
      Iw = interference() - I0;
    }
    for (double q : qs) {
      const double a = gdl * (q * h.squaredNorm() + n.sigma_dl) / hd;
      const double b = gdl * cf / hd;
      double p = a, P = 0;
      if (J == 1) {
        const double c0 = gul * (I0 + q * Iz) / S;
        const double e = gul * Iw / S;
        if (b * e >= 1.0) continue;
        p = (a + b * c0) / (1.0 - b * e);
        P = c0 + e * p;
      }
      cands.push_back({p + NT * q, p, q, P, di});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.q1 != b.q1 ? a.q1 < b.q1 : a.dir < b.dir;
  });

  GridBound out;
  out.candidates = static_cast<long>(cands.size());
  OracleOptions quick = o.check;
  quick.n_samples = std::min(o.quick_samples, o.check.n_samples);
  for (const Candidate& cd_ : cands) {
    AllocationPolicy pol;
    const CVec w = std::sqrt(cd_.p) * net[cd_.dir];
    pol.w = {w};
    pol.W = {HermitianMatrix::outer(w)};
    pol.Z = HermitianMatrix::identity(NT) * cd_.q;
    pol.P.assign(J, cd_.P);
    ++out.screened;
    if (leaks_at_probe(pol, x, c, o.check.feas_tol)) continue;
    if (!check_impl(pol, x, c, quick, true).passed()) continue;
    if (!check_impl(pol, x, c, o.check, true).passed()) continue;
    out.q1 = cd_.q1;
    out.p = cd_.p;
    out.q = cd_.q;
    out.P = cd_.P;
    out.direction = net[cd_.dir];
    break;
  }
  return out;
}

}  // namespace fdsec
