// Monte Carlo driver: one subcommand per experiment kind.
#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "fdsec/errors.hpp"
#include "fdsec/harness.hpp"

namespace {

bool on_off(const std::string& v) { return v == "on"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust secure full-duplex resource allocation: Monte Carlo experiments"};
  app.require_subcommand(1);

  std::string config_path;
  int trials = 50;
  std::uint64_t seed = 1;
  double lambda_step = 0.01;
  double lambda1 = 0.1;
  std::string baseline = "on";
  std::string verify = "off";
  std::string out = "results";
  bool timing = false;
  int workers = 0;
  std::vector<double> points;
  bool quiet = false;

  for (fdsec::ExperimentKind kind : fdsec::all_experiments()) {
    CLI::App* sub = app.add_subcommand(fdsec::experiment_name(kind));
    sub->add_option("--config", config_path, "key = value config file (default: desk scale)")->check(CLI::ExistingFile);
    sub->add_option("--trials", trials, "channel drops per sweep point")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed of the first drop");
    sub->add_option("--lambda-step", lambda_step, "weight grid step (tradeoff)");
    sub->add_option("--lambda1", lambda1, "DL weight of the sweep experiments");
    sub->add_option("--baseline", baseline, "solve the ZF baseline too")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--verify", verify, "adversarial check of every solution")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--timing", timing, "record wall-clock solve times (breaks byte reproducibility)");
    sub->add_option("--workers", workers, "worker threads (0: all cores)");
    if (!fdsec::sweep_parameter(kind).empty())
      sub->add_option("--points", points, "sweep values of " + fdsec::sweep_parameter(kind))->delimiter(',');
    sub->add_flag("--quiet", quiet, "no progress on stderr");
    sub->callback([&, kind] {
      fdsec::ExperimentOptions o;
      o.kind = kind;
      o.config = config_path.empty() ? fdsec::SystemConfig::desk_defaults() : fdsec::load_config(config_path);
      o.trials = trials;
      o.seed = seed;
      o.lambda_step = lambda_step;
      o.lambda1 = lambda1;
      o.baseline = on_off(baseline);
      o.verify = on_off(verify);
      o.timing = timing;
      o.workers = workers;
      o.points = points;
      o.progress = !quiet;
      fdsec::ensure_writable(out);
      const fdsec::ExperimentResult r = fdsec::run_experiment(o);
      fdsec::write_results(r, out);
      if (!quiet) std::cerr << "wrote " << r.points.size() << " csv file(s) and summary.json to " << out << "\n";
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const fdsec::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fdsec::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
