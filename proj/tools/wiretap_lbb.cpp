// wiretap-lbb: location-based transmit beamforming against a multi-antenna
// eavesdropper in Rician fading. Loads a TOML scenario, runs the requested
// experiment and writes a self-describing CSV report plus a gnuplot script.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lbb/cli/config.hpp"
#include "lbb/cli/csv.hpp"
#include "lbb/cli/experiments.hpp"
#include "lbb/errors.hpp"
#include "lbb/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_numeric_error = 3;
constexpr int exit_validation_failure = 4;

struct CliOverrides {
  std::string config_path;
  std::string output;
  std::int64_t seed = -1;
  std::int64_t trials = -1;
  std::int64_t realizations = -1;
  std::int64_t grid = -1;
  std::int64_t workers = -1;
  std::int64_t single_h_seed = 0;
  bool single_h = false;
  bool validate = false;
  bool quick = false;
  bool oracle = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lbb::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run(lbb::cli::ExperimentKind kind, const CliOverrides& cli) {
  lbb::cli::ExperimentConfig cfg = lbb::cli::load_experiment_config(read_file(cli.config_path));
  cfg.kind = kind;
  if (cli.seed >= 0) cfg.seed = static_cast<std::uint64_t>(cli.seed);
  if (cli.trials >= 1) cfg.n_trials = cli.trials;
  if (cli.realizations >= 1) cfg.n_realizations = cli.realizations;
  if (cli.grid >= 2) cfg.grid_size = static_cast<int>(cli.grid);
  if (cli.workers >= 1) cfg.workers = static_cast<int>(cli.workers);
  if (!cli.output.empty()) cfg.output = cli.output;
  if (cli.validate) cfg.validate = true;
  if (cli.quick) cfg.quick = true;
  if (cli.oracle) cfg.oracle = true;
  if (cli.single_h) {
    cfg.single_h = true;
    cfg.single_h_seed = static_cast<std::uint64_t>(cli.single_h_seed);
  }

  const lbb::cli::RunResult result = lbb::cli::run_experiment(cfg);
  const std::string csv_path =
      cfg.output.empty() ? std::string(lbb::cli::kind_name(kind)) + ".csv" : cfg.output;
  lbb::cli::write_csv(result.report, csv_path);
  std::cout << "wrote " << csv_path << "\n";
  if (!result.plot_script.empty()) {
    const std::string gp_path = csv_path + ".gp";
    std::ofstream gp(gp_path, std::ios::binary);
    if (!gp) throw lbb::ConfigError("cannot write plot script to '" + gp_path + "'");
    gp << result.plot_script;
    std::cout << "wrote " << gp_path << "\n";
  }
  if (!result.summary.empty()) std::cout << result.summary;
  return result.validation_failures == 0 ? exit_ok : exit_validation_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("wiretap-lbb ") + lbb::version +
               " - location-based beamforming for Rician wiretap channels"};
  app.require_subcommand(1);

  CliOverrides cli;
  lbb::cli::ExperimentKind kind = lbb::cli::ExperimentKind::sweep_tau;

  auto add_common = [&](CLI::App* sub, lbb::cli::ExperimentKind k) {
    sub->add_option("--config", cli.config_path, "scenario TOML file")->required();
    sub->add_option("--seed", cli.seed, "master seed override");
    sub->add_option("--trials", cli.trials, "Monte Carlo trials override");
    sub->add_option("--realizations", cli.realizations, "channel realizations override");
    sub->add_option("--grid", cli.grid, "tau grid size override");
    sub->add_option("--workers", cli.workers, "worker thread count");
    sub->add_option("--out", cli.output, "output CSV path");
    sub->add_flag("--validate", cli.validate, "add Monte Carlo validation columns");
    sub->add_flag("--quick", cli.quick, "reduced trial counts for a fast pass");
    sub->add_flag("--oracle", cli.oracle, "add the random-search oracle column");
    sub->add_option("--single-h", cli.single_h_seed,
                    "use one main-channel draw with this substream index")
        ->expected(1)
        ->each([&](const std::string&) { cli.single_h = true; });
    sub->callback([&, k]() { kind = k; });
  };

  add_common(app.add_subcommand("sweep-tau", "outage versus tau per antenna count"),
             lbb::cli::ExperimentKind::sweep_tau);
  add_common(app.add_subcommand("optimize", "optimal tau and minimal outage"),
             lbb::cli::ExperimentKind::optimize);
  add_common(app.add_subcommand("sweep-snr", "minimal outage versus mean SNR at Bob"),
             lbb::cli::ExperimentKind::sweep_snr);
  add_common(app.add_subcommand("uncertainty", "outage under eavesdropper location uncertainty"),
             lbb::cli::ExperimentKind::uncertainty);
  add_common(app.add_subcommand("validate", "run the simulation-oracle check bundle"),
             lbb::cli::ExperimentKind::validate);
  add_common(app.add_subcommand("fisher", "TDOA Fisher information and location covariance"),
             lbb::cli::ExperimentKind::fisher);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    return run(kind, cli);
  } catch (const lbb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const lbb::DegenerateGeometry& e) {
    std::cerr << "degenerate geometry: " << e.what() << "\n";
    return exit_numeric_error;
  } catch (const lbb::DegenerateAnchors& e) {
    std::cerr << "degenerate anchors: " << e.what() << "\n";
    return exit_numeric_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric_error;
  }
}
