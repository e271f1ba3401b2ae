#pragma once
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fdsec/moop.hpp"

namespace fdsec {

enum class ExperimentKind {
  tradeoff,
  power_vs_dl_sinr,
  outage_vs_dl_sinr,
  power_vs_ul_sinr,
  secrecy_vs_dl_sinr,
  secrecy_vs_ul_sinr,
  power_vs_kappa,
};

const char* experiment_name(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment(const std::string& name);
const std::vector<ExperimentKind>& all_experiments();
// Config field the kind sweeps ("" for tradeoff) and its default values.
std::string sweep_parameter(ExperimentKind k);
std::vector<double> default_points(ExperimentKind k);

enum class Scheme { proposed, baseline };
const char* scheme_name(Scheme s);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunRecord {
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::proposed;
  double lambda1 = 0.0;
  std::string status;  // optimal | infeasible | numerical-failure | degenerate
  // Objective values are NaN unless optimal.
  double q1_dbm = kNaN;
  double q2_dbm = kNaN;
  double tau = kNaN;
  std::vector<double> dl_secrecy;
  std::vector<double> ul_secrecy;
  double min_dl_secrecy = kNaN;
  double min_ul_secrecy = kNaN;
  double avg_dl_secrecy = kNaN;  // sum / K
  double avg_ul_secrecy = kNaN;  // sum / J
  double solve_ms = 0.0;
  double max_rank_ratio = kNaN;
  // --verify only.
  std::optional<int> adversarial_violations;
  std::optional<double> adversarial_worst_margin;

  bool optimal() const { return status == "optimal"; }
};

// watts -> dBm; NaN for non-positive input.
double watt_to_dbm(double w);

// Fills a record from a frontier point; secrecy summaries follow the per-user averages.
RunRecord make_record(std::uint64_t seed, Scheme scheme, const ParetoPoint& p, bool timing);

struct ExperimentOptions {
  ExperimentKind kind = ExperimentKind::tradeoff;
  SystemConfig config = SystemConfig::desk_defaults();
  int trials = 50;
  std::uint64_t seed = 1;
  double lambda_step = 0.01;  // tradeoff only
  double lambda1 = 0.1;       // weight of the sweep kinds
  bool baseline = true;
  bool verify = false;
  bool timing = false;
  int workers = 0;  // 0: hardware concurrency
  std::vector<double> points;  // empty: default_points(kind)
  bool progress = false;       // log to stderr
};

struct SweepResult {
  std::string parameter;  // empty for tradeoff
  double value = 0.0;
  std::vector<RunRecord> records;  // canonical order
};

struct ExperimentResult {
  ExperimentOptions options;
  std::vector<SweepResult> points;
};

// Drop seed of a trial.
std::uint64_t trial_seed(std::uint64_t base, int trial);

ExperimentResult run_experiment(const ExperimentOptions& o);

// Sort by (seed, scheme, lambda1).
void sort_records(std::vector<RunRecord>& r);

std::string format_number(double v);  // 9 significant digits, empty for NaN
std::string records_csv(const std::vector<RunRecord>& r);
std::vector<RunRecord> parse_records_csv(const std::string& text);

struct Aggregate {
  int records = 0;
  int feasible = 0;
  int infeasible = 0;
  int numerical_failure = 0;
  int degenerate = 0;
  double outage = 1.0;  // non-optimal fraction
  // Means over feasible records; NaN when none. Powers averaged in watts.
  double mean_q1_dbm = kNaN;
  double mean_q2_dbm = kNaN;
  double mean_avg_dl_secrecy = kNaN;
  double mean_avg_ul_secrecy = kNaN;
  double mean_min_dl_secrecy = kNaN;
  double mean_min_ul_secrecy = kNaN;
};

Aggregate aggregate(const std::vector<RunRecord>& r);

std::string summary_json(const ExperimentResult& r);
std::string csv_file_name(const ExperimentResult& r, const SweepResult& p);

// Throws IoError when the directory cannot be created or written.
void ensure_writable(const std::string& dir);
// One CSV per sweep value plus summary.json.
void write_results(const ExperimentResult& r, const std::string& dir);

}  // namespace fdsec
