#ifndef PPD_BENCHMARK_HPP
#define PPD_BENCHMARK_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppd/annealing.hpp"
#include "ppd/coordinate_exchange.hpp"
#include "ppd/model.hpp"
#include "ppd/prior.hpp"

namespace ppd {

// One cell of the SA-vs-CE grid.
struct RaceScenario {
  int profiles_per_set = 2;
  int num_constant = 1;
  int interaction_params = 0;
  double lambda = 1.0;
  double kappa = 1.0;
};

// Attribute 1 crossed with its 2-level partners, its multi-level partners,
// or all others; whichever gives `num_params` interaction parameters.
std::vector<AttributePair> scenario_interactions(const std::vector<int>& levels,
                                                 int num_params);

enum class BudgetMatch {
  kRuntime,      // SA gets CE's wall clock
  kEvaluations,  // SA gets CE's criterion evaluation count (reproducible)
};

const char* to_string(BudgetMatch match);
BudgetMatch budget_match_from_string(const std::string& name);

struct RaceConfig {
  int num_sets = 24;
  std::vector<int> levels;  // empty: 2,2,2,3,3,3
  int draws = kDefaultNumDraws;
  SamplingMethod sampling = SamplingMethod::kQuasiMonteCarlo;
  CeConfig ce;  // seed and threads are set per race
  SaConfig sa;  // stopping, budget and seed are set per race
  BudgetMatch match = BudgetMatch::kRuntime;
  std::uint64_t seed = 0;
};

struct RaceResult {
  int scenario = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  int num_params = 0;
  double ce_value = 0.0;
  double sa_value = 0.0;
  // Relative D_B efficiency of the CE design against the SA design.
  double efficiency = 1.0;
  double ce_seconds = 0.0;
  double sa_seconds = 0.0;
  std::int64_t ce_evaluations = 0;
  std::int64_t sa_iterations = 0;
  int sa_reheats = 0;
  Design ce_design;
  Design sa_design;
};

// Seeds: draws, CE and SA use streams 0, 1 and 2 of
// derive_seed(config.seed, replicate).
RaceResult run_race(const RaceScenario& scenario, const RaceConfig& config, int replicate,
                    int scenario_index = 0);

// Full factorial over the listed values.
std::vector<RaceScenario> expand_grid(const std::vector<int>& profiles_per_set,
                                      const std::vector<int>& num_constant,
                                      const std::vector<int>& interaction_params,
                                      const std::vector<double>& lambda,
                                      const std::vector<double>& kappa);

double median(std::vector<double> values);

// One row per race, then a "median" row over the efficiencies.
void write_race_csv(std::ostream& out, const std::vector<RaceScenario>& scenarios,
                    const std::vector<RaceResult>& results);

}  // namespace ppd

#endif  // PPD_BENCHMARK_HPP
