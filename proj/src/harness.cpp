#include "fdsec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fdsec/baseline.hpp"
#include "fdsec/errors.hpp"
#include "fdsec/oracle.hpp"

namespace fdsec {

namespace {

struct KindInfo {
  ExperimentKind kind;
  const char* name;
  const char* parameter;
};

const KindInfo kKinds[] = {
    {ExperimentKind::tradeoff, "tradeoff", ""},
    {ExperimentKind::power_vs_dl_sinr, "power-vs-dl-sinr", "gamma_dl_req_db"},
    {ExperimentKind::outage_vs_dl_sinr, "outage-vs-dl-sinr", "gamma_dl_req_db"},
    {ExperimentKind::power_vs_ul_sinr, "power-vs-ul-sinr", "gamma_ul_req_db"},
    {ExperimentKind::secrecy_vs_dl_sinr, "secrecy-vs-dl-sinr", "gamma_dl_req_db"},
    {ExperimentKind::secrecy_vs_ul_sinr, "secrecy-vs-ul-sinr", "gamma_ul_req_db"},
    {ExperimentKind::power_vs_kappa, "power-vs-kappa", "kappa_est_sq"},
};

const KindInfo& info(ExperimentKind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i;
  throw ValidationError("unknown experiment kind");
}

SystemConfig with_parameter(SystemConfig c, const std::string& name, double v) {
  if (name == "gamma_dl_req_db")
    c.gamma_dl_req_db = v;
  else if (name == "gamma_ul_req_db")
    c.gamma_ul_req_db = v;
  else if (name == "kappa_est_sq")
    c.kappa_est_sq = v;
  c.validate();
  return c;
}

const char* status_text(SolveStatus s) { return solve_status_name(s); }

double round9(double v) { return std::isfinite(v) ? std::stod(format_number(v)) : v; }

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round9(v);
}

// One trial of one sweep point: everything a worker produces.
struct Task {
  int point = 0;
  int trial = 0;
  std::vector<RunRecord> records;
};

void run_scheme(const ChannelRealization& x, const SystemConfig& c, const ExperimentOptions& o, std::uint64_t seed,
                Scheme scheme, std::vector<RunRecord>& out) {
  SweepOptions so;
  std::vector<double> lambdas;
  if (o.kind == ExperimentKind::tradeoff)
    lambdas = lambda_grid(o.lambda_step);
  else
    lambdas = {o.lambda1};
  if (scheme == Scheme::baseline) {
    try {
      so = baseline_options(x, so);
    } catch (const DegenerateChannelError&) {
      for (double l : lambdas) {
        RunRecord r;
        r.seed = seed;
        r.scheme = scheme;
        r.lambda1 = l;
        r.status = "degenerate";
        out.push_back(r);
      }
      return;
    }
  }
  const Anchors a = solve_anchors(x, c, so);
  for (double l : lambdas) {
    const ParetoPoint p = solve_weighted(x, c, l, a, so);
    RunRecord r = make_record(seed, scheme, p, o.timing);
    if (o.verify && p.optimal()) {
      const AdversarialReport rep = adversarial_check(p.policy, x, c);
      r.adversarial_violations = rep.violations();
      r.adversarial_worst_margin = rep.worst_margin();
    }
    out.push_back(std::move(r));
  }
}

}  // namespace

const char* experiment_name(ExperimentKind k) { return info(k).name; }

std::optional<ExperimentKind> parse_experiment(const std::string& name) {
  for (const auto& i : kKinds)
    if (name == i.name) return i.kind;
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> v = [] {
    std::vector<ExperimentKind> out;
    for (const auto& i : kKinds) out.push_back(i.kind);
    return out;
  }();
  return v;
}

std::string sweep_parameter(ExperimentKind k) { return info(k).parameter; }

std::vector<double> default_points(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::tradeoff: return {};
    case ExperimentKind::power_vs_dl_sinr:
    case ExperimentKind::outage_vs_dl_sinr:
    case ExperimentKind::secrecy_vs_dl_sinr: return {0, 2, 4, 6, 8, 10, 12};
    case ExperimentKind::power_vs_ul_sinr:
    case ExperimentKind::secrecy_vs_ul_sinr: return {0, 2, 4, 6, 8, 10};
    case ExperimentKind::power_vs_kappa: return {0, 0.025, 0.05, 0.075, 0.1};
  }
  return {};
}

const char* scheme_name(Scheme s) { return s == Scheme::proposed ? "proposed" : "baseline"; }

double watt_to_dbm(double w) { return w > 0 ? 10.0 * std::log10(w * 1000.0) : kNaN; }

RunRecord make_record(std::uint64_t seed, Scheme scheme, const ParetoPoint& p, bool timing) {
  RunRecord r;
  r.seed = seed;
  r.scheme = scheme;
  r.lambda1 = p.lambda1;
  r.status = status_text(p.status);
  if (timing) r.solve_ms = p.seconds * 1e3;
  if (!p.optimal()) return r;
  r.q1_dbm = watt_to_dbm(p.q1);
  r.q2_dbm = watt_to_dbm(p.q2);
  r.tau = p.tau;
  r.max_rank_ratio = p.max_rank_ratio;
  r.dl_secrecy = p.secrecy.dl;
  r.ul_secrecy = p.secrecy.ul;
  auto summarize = [](const std::vector<double>& v, double& mn, double& avg) {
    if (v.empty()) return;
    mn = *std::min_element(v.begin(), v.end());
    double s = 0;
    for (double x : v) s += x;
    avg = s / v.size();
  };
  summarize(r.dl_secrecy, r.min_dl_secrecy, r.avg_dl_secrecy);
  summarize(r.ul_secrecy, r.min_ul_secrecy, r.avg_ul_secrecy);
  return r;
}

std::uint64_t trial_seed(std::uint64_t base, int trial) { return base + static_cast<std::uint64_t>(trial); }

void sort_records(std::vector<RunRecord>& r) {
  std::stable_sort(r.begin(), r.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.seed != b.seed) return a.seed < b.seed;
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    return a.lambda1 < b.lambda1;
  });
}

ExperimentResult run_experiment(const ExperimentOptions& o) {
  o.config.validate();
  if (o.trials < 1) throw ValidationError("trials must be positive");
  if (o.kind == ExperimentKind::tradeoff) lambda_grid(o.lambda_step);  // validates
  if (!(o.lambda1 >= 0 && o.lambda1 <= 1)) throw ValidationError("lambda1 must lie in [0, 1]");

  ExperimentResult res;
  res.options = o;
  const std::string param = sweep_parameter(o.kind);
  std::vector<double> values = o.points.empty() ? default_points(o.kind) : o.points;
  if (param.empty()) values = {0.0};
  std::vector<SystemConfig> configs;
  for (double v : values) {
    SweepResult sp;
    sp.parameter = param;
    sp.value = param.empty() ? 0.0 : v;
    res.points.push_back(sp);
    configs.push_back(param.empty() ? o.config : with_parameter(o.config, param, v));
  }
  if (res.options.points.empty() && !param.empty()) res.options.points = values;

  std::vector<Task> tasks;
  for (int p = 0; p < static_cast<int>(values.size()); ++p)
    for (int t = 0; t < o.trials; ++t) tasks.push_back({p, t, {}});

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      Task& task = tasks[i];
      try {
        const SystemConfig& c = configs[task.point];
        const std::uint64_t seed = trial_seed(o.seed, task.trial);
        const ChannelRealization x = generate_drop(c, seed);
        run_scheme(x, c, o, seed, Scheme::proposed, task.records);
        if (o.baseline) run_scheme(x, c, o, seed, Scheme::baseline, task.records);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = tasks.size();
        return;
      }
      const std::size_t d = ++done;
      if (o.progress) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << experiment_name(o.kind) << ": " << d << "/" << tasks.size() << " drops\n";
      }
    }
  };
  int n_workers = o.workers > 0 ? o.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_workers = std::min<int>(n_workers, static_cast<int>(tasks.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (auto& t : tasks)
    for (auto& r : t.records) res.points[t.point].records.push_back(std::move(r));
  for (auto& p : res.points) sort_records(p.records);
  return res;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

const char* kColumns[] = {"seed",           "scheme",         "lambda1",        "status",
                          "q1_dbm",         "q2_dbm",         "tau",            "min_dl_secrecy",
                          "min_ul_secrecy", "avg_dl_secrecy", "avg_ul_secrecy", "solve_ms",
                          "max_rank_ratio"};

double parse_field(const std::string& s) {
  if (s.empty()) return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ValidationError("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << "\n";
  for (const auto& r : records) {
    out << r.seed << ',' << scheme_name(r.scheme) << ',' << format_number(r.lambda1) << ',' << r.status << ','
        << format_number(r.q1_dbm) << ',' << format_number(r.q2_dbm) << ',' << format_number(r.tau) << ','
        << format_number(r.min_dl_secrecy) << ',' << format_number(r.min_ul_secrecy) << ','
        << format_number(r.avg_dl_secrecy) << ',' << format_number(r.avg_ul_secrecy) << ','
        << format_number(r.solve_ms) << ',' << format_number(r.max_rank_ratio) << "\n";
  }
  return out.str();
}

std::vector<RunRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: missing header");
  {
    std::string expect;
    for (std::size_t i = 0; i < std::size(kColumns); ++i) expect += (i ? "," : "") + std::string(kColumns[i]);
    if (line != expect) throw ValidationError("csv: unexpected header");
  }
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != std::size(kColumns)) throw ValidationError("csv: wrong field count");
    RunRecord r;
    r.seed = std::stoull(f[0]);
    if (f[1] == "proposed")
      r.scheme = Scheme::proposed;
    else if (f[1] == "baseline")
      r.scheme = Scheme::baseline;
    else
      throw ValidationError("csv: unknown scheme '" + f[1] + "'");
    r.lambda1 = parse_field(f[2]);
    r.status = f[3];
    r.q1_dbm = parse_field(f[4]);
    r.q2_dbm = parse_field(f[5]);
    r.tau = parse_field(f[6]);
    r.min_dl_secrecy = parse_field(f[7]);
    r.min_ul_secrecy = parse_field(f[8]);
    r.avg_dl_secrecy = parse_field(f[9]);
    r.avg_ul_secrecy = parse_field(f[10]);
    r.solve_ms = parse_field(f[11]);
    r.max_rank_ratio = parse_field(f[12]);
    out.push_back(r);
  }
  return out;
}

Aggregate aggregate(const std::vector<RunRecord>& records) {
  Aggregate a;
  double q1 = 0, q2 = 0;
  double sums[4] = {0, 0, 0, 0};
  int counts[4] = {0, 0, 0, 0};
  for (const auto& r : records) {
    ++a.records;
    if (r.optimal()) {
      ++a.feasible;
      q1 += std::pow(10.0, r.q1_dbm / 10.0) / 1000.0;
      q2 += std::pow(10.0, r.q2_dbm / 10.0) / 1000.0;
      const double vals[4] = {r.avg_dl_secrecy, r.avg_ul_secrecy, r.min_dl_secrecy, r.min_ul_secrecy};
      for (int i = 0; i < 4; ++i)
        if (std::isfinite(vals[i])) {
          sums[i] += vals[i];
          ++counts[i];
        }
    } else if (r.status == "infeasible") {
      ++a.infeasible;
    } else if (r.status == "degenerate") {
      ++a.degenerate;
    } else {
      ++a.numerical_failure;
    }
  }
  if (a.records > 0) a.outage = 1.0 - static_cast<double>(a.feasible) / a.records;
  if (a.feasible > 0) {
    a.mean_q1_dbm = watt_to_dbm(q1 / a.feasible);
    a.mean_q2_dbm = watt_to_dbm(q2 / a.feasible);
  }
  double* means[4] = {&a.mean_avg_dl_secrecy, &a.mean_avg_ul_secrecy, &a.mean_min_dl_secrecy, &a.mean_min_ul_secrecy};
  for (int i = 0; i < 4; ++i)
    if (counts[i] > 0) *means[i] = sums[i] / counts[i];
  return a;
}

namespace {

nlohmann::json aggregate_json(const Aggregate& a) {
  nlohmann::json j;
  j["records"] = a.records;
  j["feasible"] = a.feasible;
  j["infeasible"] = a.infeasible;
  j["numerical_failure"] = a.numerical_failure;
  j["degenerate"] = a.degenerate;
  j["outage"] = round9(a.outage);
  if (a.feasible > 0) {
    j["mean_q1_dbm"] = number(a.mean_q1_dbm);
    j["mean_q2_dbm"] = number(a.mean_q2_dbm);
    j["mean_avg_dl_secrecy"] = number(a.mean_avg_dl_secrecy);
    j["mean_avg_ul_secrecy"] = number(a.mean_avg_ul_secrecy);
    j["mean_min_dl_secrecy"] = number(a.mean_min_dl_secrecy);
    j["mean_min_ul_secrecy"] = number(a.mean_min_ul_secrecy);
  }
  return j;
}

std::vector<RunRecord> select(const std::vector<RunRecord>& r, Scheme s, std::optional<double> lambda1 = {},
                              const std::set<std::uint64_t>* seeds = nullptr) {
  std::vector<RunRecord> out;
  for (const auto& x : r)
    if (x.scheme == s && (!lambda1 || x.lambda1 == *lambda1) && (!seeds || seeds->count(x.seed))) out.push_back(x);
  return out;
}

}  // namespace

std::string summary_json(const ExperimentResult& res) {
  const ExperimentOptions& o = res.options;
  nlohmann::json j;
  j["experiment"] = experiment_name(o.kind);
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["baseline"] = o.baseline;
  j["verify"] = o.verify;
  if (o.kind == ExperimentKind::tradeoff)
    j["lambda_step"] = round9(o.lambda_step);
  else
    j["lambda1"] = round9(o.lambda1);
  nlohmann::json cfg = nlohmann::json::object();
  {
    std::istringstream in(format_config(o.config));
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      const double v = round9(std::stod(line.substr(eq + 3)));
      if (v == std::floor(v) && std::abs(v) < 1e15)
        cfg[line.substr(0, eq)] = static_cast<long long>(v);
      else
        cfg[line.substr(0, eq)] = v;
    }
  }
  j["config"] = cfg;

  std::vector<Scheme> schemes{Scheme::proposed};
  if (o.baseline) schemes.push_back(Scheme::baseline);

  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : res.points) {
    nlohmann::json pj;
    if (!p.parameter.empty()) {
      pj["parameter"] = p.parameter;
      pj["value"] = round9(p.value);
    }
    pj["csv"] = csv_file_name(res, p);
    for (Scheme s : schemes) {
      if (o.kind == ExperimentKind::tradeoff) {
        // Drop-level outage plus the mean frontier over feasible drops.
        const auto anchors = select(p.records, s, 1.0);
        nlohmann::json sj = aggregate_json(aggregate(anchors));
        nlohmann::json frontier = nlohmann::json::array();
        for (double l : lambda_grid(o.lambda_step)) {
          const Aggregate a = aggregate(select(p.records, s, l));
          nlohmann::json fj;
          fj["lambda1"] = round9(l);
          fj["feasible"] = a.feasible;
          if (a.feasible > 0) {
            fj["mean_q1_dbm"] = number(a.mean_q1_dbm);
            fj["mean_q2_dbm"] = number(a.mean_q2_dbm);
          }
          frontier.push_back(fj);
        }
        sj["frontier"] = frontier;
        pj[scheme_name(s)] = sj;
      } else {
        pj[scheme_name(s)] = aggregate_json(aggregate(select(p.records, s)));
      }
    }
    if (o.verify) {
      int checked = 0, violations = 0;
      for (const auto& r : p.records)
        if (r.adversarial_violations) {
          ++checked;
          violations += *r.adversarial_violations;
        }
      pj["adversarial"] = {{"checked", checked}, {"violations", violations}};
    }
    points.push_back(pj);
  }
  j["points"] = points;

  // Sweep kinds: means over the drops feasible at every point, free of the
  // selection effect of per-point averaging.
  if (o.kind != ExperimentKind::tradeoff) {
    nlohmann::json common;
    for (Scheme s : schemes) {
      std::set<std::uint64_t> seeds;
      for (int t = 0; t < o.trials; ++t) seeds.insert(trial_seed(o.seed, t));
      for (const auto& p : res.points)
        for (const auto& r : select(p.records, s))
          if (!r.optimal()) seeds.erase(r.seed);
      nlohmann::json sj;
      sj["drops"] = seeds.size();
      nlohmann::json vals = nlohmann::json::array();
      if (!seeds.empty())
        for (const auto& p : res.points) {
          const Aggregate a = aggregate(select(p.records, s, {}, &seeds));
          nlohmann::json v = aggregate_json(a);
          v["value"] = round9(p.value);
          vals.push_back(v);
        }
      sj["points"] = vals;
      common[scheme_name(s)] = sj;
    }
    j["common_feasible"] = common;
  }
  return j.dump(2) + "\n";
}

std::string csv_file_name(const ExperimentResult& r, const SweepResult& p) {
  std::string name = experiment_name(r.options.kind);
  if (!p.parameter.empty()) name += "_" + p.parameter + "=" + format_number(p.value);
  return name + ".csv";
}

void ensure_writable(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path probe = fs::path(dir) / ".fdsec-write-probe";
  {
    std::ofstream f(probe);
    if (!f || !(f << "x") || !f.flush()) throw IoError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

void write_results(const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  ensure_writable(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f || !(f << text) || !f.flush()) throw IoError("cannot write '" + name + "' in '" + dir + "'");
  };
  for (const auto& p : r.points) write(csv_file_name(r, p), records_csv(p.records));
  write("summary.json", summary_json(r));
}

}  // namespace fdsec
