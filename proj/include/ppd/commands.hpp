#ifndef PPD_COMMANDS_HPP
#define PPD_COMMANDS_HPP

#include <filesystem>
#include <vector>

#include "ppd/config.hpp"
#include "ppd/error.hpp"
#include "ppd/simulation.hpp"

namespace ppd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNumerical = 4;

int exit_code(ErrorKind kind);

// Prior draws every command shares: the main-effects draws are the leading
// columns of the interaction draws.
struct CommonDraws {
  PriorDraws main;
  PriorDraws interaction;
};

CommonDraws common_draws(const ScenarioConfig& config);

Objective build_objective(const ScenarioConfig& config, const CommonDraws& draws);

// Reads config.designs, resolving relative paths against the config file.
// Each design must be valid in the configured space.
std::vector<DesignEntry> load_designs(const ScenarioConfig& config);

// Each writes its artifacts under `out` (created if needed). Failures throw
// Error; exit_code maps the kind.
void run_generate(const ScenarioConfig& config, const std::filesystem::path& out);
void run_evaluate(const ScenarioConfig& config, const std::filesystem::path& out);
void run_simulate(const ScenarioConfig& config, const std::filesystem::path& out);
void run_benchmark(const ScenarioConfig& config, const std::filesystem::path& out);

}  // namespace ppd

#endif  // PPD_COMMANDS_HPP
