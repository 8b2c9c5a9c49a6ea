#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ppd/commands.hpp"
#include "ppd/config.hpp"
#include "ppd/error.hpp"
#include "ppd/parallel.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "scenario config (JSON)")->required();
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed, overrides the config");
  cmd->add_option("--draws", o.draws, "prior draws R, overrides the config")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "worker threads, overrides PPD_THREADS and the config")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian D-optimal partial profile designs for choice experiments"};
  app.require_subcommand(1);
  Options o;
  CLI::App* generate = app.add_subcommand("generate", "optimize a design (SA or two-stage CE)");
  CLI::App* evaluate = app.add_subcommand("evaluate", "relative D_B efficiencies on common draws");
  CLI::App* simulate = app.add_subcommand("simulate", "EMSE of designs over simulated surveys");
  CLI::App* benchmark = app.add_subcommand("benchmark", "matched-budget SA vs CE races");
  for (CLI::App* cmd : {generate, evaluate, simulate, benchmark}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ppd::kExitConfig;
  }

  try {
    ppd::ConfigOverrides overrides;
    overrides.seed = o.seed;
    overrides.draws = o.draws;
    if (o.threads) overrides.threads = o.threads;
    else if (std::getenv("PPD_THREADS")) overrides.threads = ppd::thread_count_from_env(1);

    const ppd::ScenarioConfig config = ppd::load_config(o.config, overrides);
    if (generate->parsed()) ppd::run_generate(config, o.out);
    else if (evaluate->parsed()) ppd::run_evaluate(config, o.out);
    else if (simulate->parsed()) ppd::run_simulate(config, o.out);
    else ppd::run_benchmark(config, o.out);
    std::cout << "wrote " << o.out << "\n";
    return ppd::kExitOk;
  } catch (const ppd::Error& e) {
    std::cerr << "ppd: " << e.what() << "\n";
    return ppd::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ppd: " << e.what() << "\n";
    return ppd::kExitNumerical;
  }
}
