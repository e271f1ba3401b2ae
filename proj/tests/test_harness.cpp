#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fdsec/errors.hpp"
#include "fdsec/harness.hpp"

using namespace fdsec;
namespace fs = std::filesystem;

namespace {

SystemConfig tiny() {
  SystemConfig c = SystemConfig::desk_defaults();
  c.rho_db = -150;
  c.K = 1;
  c.J = 1;
  c.M = 1;
  c.N_T = 2;
  c.N_R = 1;
  return c;
}

RunRecord rec(std::uint64_t seed, const std::string& status, double q1_dbm = kNaN) {
  RunRecord r;
  r.seed = seed;
  r.status = status;
  r.q1_dbm = q1_dbm;
  if (r.optimal()) {
    r.q2_dbm = q1_dbm - 3;
    r.min_dl_secrecy = r.avg_dl_secrecy = 2;
    r.min_ul_secrecy = r.avg_ul_secrecy = 1;
  }
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fdsec_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("experiment names") {
  CHECK(all_experiments().size() == 7);
  for (ExperimentKind k : all_experiments()) CHECK(parse_experiment(experiment_name(k)) == k);
  CHECK(!parse_experiment("nope"));
  CHECK(sweep_parameter(ExperimentKind::tradeoff).empty());
  CHECK(sweep_parameter(ExperimentKind::power_vs_kappa) == "kappa_est_sq");
  CHECK(default_points(ExperimentKind::outage_vs_dl_sinr).size() == 7);
}

TEST_CASE("unit conversion and number formatting") {
  CHECK(watt_to_dbm(1.0) == doctest::Approx(30.0));
  CHECK(watt_to_dbm(1e-3) == doctest::Approx(0.0));
  CHECK(std::isnan(watt_to_dbm(0.0)));
  CHECK(format_number(kNaN).empty());
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(trial_seed(100, 7) == 107);
}

TEST_CASE("aggregation") {
  std::vector<RunRecord> r = {rec(1, "optimal", 10), rec(2, "optimal", 20), rec(3, "infeasible"),
                              rec(4, "optimal", 10)};
  const Aggregate a = aggregate(r);
  CHECK(a.records == 4);
  CHECK(a.feasible == 3);
  CHECK(a.infeasible == 1);
  CHECK(a.outage == doctest::Approx(0.25));
  // powers are averaged in watts: (10 + 100 + 10) mW / 3 = 40 mW
  CHECK(a.mean_q1_dbm == doctest::Approx(10 * std::log10(40.0)));
  CHECK(a.mean_avg_dl_secrecy == doctest::Approx(2));

  const Aggregate none = aggregate({rec(1, "infeasible"), rec(2, "numerical-failure")});
  CHECK(none.outage == 1.0);
  CHECK(none.numerical_failure == 1);
  CHECK(std::isnan(none.mean_q1_dbm));
}

TEST_CASE("secrecy summaries average per user") {
  ParetoPoint p;
  p.status = SolveStatus::optimal;
  p.q1 = 1e-3;
  p.q2 = 1e-2;
  p.secrecy.dl = {1.0, 3.0};
  p.secrecy.ul = {0.5, 1.5, 4.0};
  const RunRecord r = make_record(9, Scheme::baseline, p, false);
  CHECK(r.q1_dbm == doctest::Approx(0.0));
  CHECK(r.q2_dbm == doctest::Approx(10.0));
  CHECK(r.min_dl_secrecy == 1.0);
  CHECK(r.avg_dl_secrecy == 2.0);
  CHECK(r.min_ul_secrecy == 0.5);
  CHECK(r.avg_ul_secrecy == 2.0);
  CHECK(r.solve_ms == 0.0);
  p.status = SolveStatus::infeasible;
  const RunRecord f = make_record(9, Scheme::proposed, p, false);
  CHECK(f.status == "infeasible");
  CHECK(std::isnan(f.q1_dbm));
  CHECK(std::isnan(f.avg_dl_secrecy));
}

TEST_CASE("csv round trip") {
  std::vector<RunRecord> r = {rec(5, "optimal", 12.345678912), rec(6, "infeasible")};
  r[0].lambda1 = 0.37;
  r[0].tau = 1e-4;
  r[0].max_rank_ratio = 2e-10;
  r[1].scheme = Scheme::baseline;
  const std::string text = records_csv(r);
  CHECK(text.substr(0, text.find('\n')).find(',') != std::string::npos);
  const auto back = parse_records_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].seed == 5);
  CHECK(back[0].lambda1 == 0.37);
  CHECK(back[0].q1_dbm == doctest::Approx(12.345678912).epsilon(1e-9));
  CHECK(back[0].tau == 1e-4);
  CHECK(back[1].scheme == Scheme::baseline);
  CHECK(back[1].status == "infeasible");
  CHECK(std::isnan(back[1].q1_dbm));
  CHECK(records_csv(back) == text);
  CHECK_THROWS_AS(parse_records_csv("seed,scheme\n1,x\n"), ValidationError);
}

TEST_CASE("tradeoff run produces one record per weight") {
  ExperimentOptions o;
  o.kind = ExperimentKind::tradeoff;
  o.config = tiny();
  o.trials = 1;
  o.seed = 1;
  o.baseline = false;
  const ExperimentResult res = run_experiment(o);
  REQUIRE(res.points.size() == 1);
  const auto& recs = res.points[0].records;
  REQUIRE(recs.size() == 101);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].seed == 1);
    CHECK(recs[i].lambda1 == doctest::Approx(i * 0.01));
    CHECK(recs[i].optimal());
  }
  CHECK(csv_file_name(res, res.points[0]) == "tradeoff.csv");
}

TEST_CASE("sweep runs are reproducible and independent of the worker count") {
  ExperimentOptions o;
  o.kind = ExperimentKind::power_vs_dl_sinr;
  o.config = tiny();
  o.trials = 4;
  o.seed = 20;
  o.points = {0, 6};
  o.verify = true;
  o.workers = 1;
  const ExperimentResult a = run_experiment(o);
  o.workers = 3;
  const ExperimentResult b = run_experiment(o);
  REQUIRE(a.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.points[i].records.size() == 8);  // both schemes
    CHECK(records_csv(a.points[i].records) == records_csv(b.points[i].records));
  }
  CHECK(summary_json(a) == summary_json(b));
  CHECK(csv_file_name(a, a.points[1]) == "power-vs-dl-sinr_gamma_dl_req_db=6.csv");

  const auto j = nlohmann::json::parse(summary_json(a));
  CHECK(j["experiment"] == "power-vs-dl-sinr");
  REQUIRE(j["points"].size() == 2);
  CHECK(j["points"][0]["proposed"]["records"] == 4);
  CHECK(j["points"][0]["adversarial"]["violations"] == 0);

  const fs::path dir = scratch("out");
  write_results(a, dir.string());
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(slurp(dir / csv_file_name(a, a.points[0])) == records_csv(a.points[0].records));
  fs::remove_all(dir);
}

TEST_CASE("summary of an all-outage sweep has no means") {
  ExperimentOptions o;
  o.kind = ExperimentKind::outage_vs_dl_sinr;
  o.config = tiny();
  o.config.gamma_ul_req_db = 80;
  o.config.rho_db = -80;
  o.trials = 2;
  o.points = {10};
  o.baseline = false;
  const ExperimentResult r = run_experiment(o);
  const auto j = nlohmann::json::parse(summary_json(r));
  const auto& p = j["points"][0]["proposed"];
  CHECK(p["outage"] == 1.0);
  CHECK(p["feasible"] == 0);
  CHECK(!p.contains("mean_q1_dbm"));
}

TEST_CASE("unwritable output directory") {
  const fs::path file = scratch("file");
  std::ofstream(file) << "x";
  CHECK_THROWS_AS(ensure_writable((file / "sub").string()), IoError);
  fs::remove(file);
  const fs::path ok = scratch("ok");
  CHECK_NOTHROW(ensure_writable(ok.string()));
  CHECK(fs::is_directory(ok));
  fs::remove_all(ok);
}
