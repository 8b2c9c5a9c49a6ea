#include "ppd/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ppd/criterion.hpp"
#include "ppd/error.hpp"
#include "ppd/rng.hpp"
#include "ppd/scenarios.hpp"

namespace ppd {

std::vector<AttributePair> scenario_interactions(const std::vector<int>& levels,
                                                 int num_params) {
  if (num_params == 0) return {};
  if (levels.size() < 2)
    throw Error(ErrorKind::kInvalidInput, "interactions need at least two attributes");
  std::vector<AttributePair> two_level, multi_level, all;
  int n_two = 0, n_multi = 0;
  const int d0 = levels[0] - 1;
  for (int k = 1; k < static_cast<int>(levels.size()); ++k) {
    const int n = d0 * (levels[k] - 1);
    all.push_back({0, k});
    if (levels[k] == 2) {
      two_level.push_back({0, k});
      n_two += n;
    } else {
      multi_level.push_back({0, k});
      n_multi += n;
    }
  }
  if (n_two == num_params && !two_level.empty()) return two_level;
  if (n_multi == num_params && !multi_level.empty()) return multi_level;
  if (n_two + n_multi == num_params) return all;
  throw Error(ErrorKind::kInvalidInput,
              "no interaction set of attribute 1 has " + std::to_string(num_params) +
                  " parameters (options: " + std::to_string(n_two) + ", " +
                  std::to_string(n_multi) + ", " + std::to_string(n_two + n_multi) + ")");
}

const char* to_string(BudgetMatch match) {
  return match == BudgetMatch::kRuntime ? "runtime" : "evaluations";
}

BudgetMatch budget_match_from_string(const std::string& name) {
  if (name == "runtime") return BudgetMatch::kRuntime;
  if (name == "evaluations") return BudgetMatch::kEvaluations;
  throw Error(ErrorKind::kInvalidInput, "unknown budget match '" + name + "'");
}

RaceResult run_race(const RaceScenario& scenario, const RaceConfig& config, int replicate,
                    int scenario_index) {
  const std::vector<int> levels = config.levels.empty() ? benchmark_levels() : config.levels;
  const DesignSpace space(config.num_sets, scenario.profiles_per_set, levels,
                          scenario.num_constant);
  check_feasible(space);
  const ModelSpec model(levels, scenario_interactions(levels, scenario.interaction_params));
  const PriorSpec prior = build_prior_family(levels, model.interactions(), scenario.lambda,
                                             scenario.kappa, InteractionPrior::kNaive);

  RaceResult out;
  out.scenario = scenario_index;
  out.replicate = replicate;
  out.seed = derive_seed(config.seed, static_cast<std::uint64_t>(replicate));
  out.num_params = model.num_params();

  const PriorDraws draws =
      sample_prior(prior, config.draws, derive_seed(out.seed, 0), config.sampling);
  const Objective objective = Objective::bayesian(model, draws);

  CeConfig ce = config.ce;
  ce.seed = derive_seed(out.seed, 1);
  ce.threads = 1;
  const TwoStageResult ce_result = two_stage_ce(space, objective, ce);

  SaConfig sa = config.sa;
  sa.seed = derive_seed(out.seed, 2);
  sa.stopping = StoppingRule::kMaxRuntime;
  if (config.match == BudgetMatch::kRuntime) {
    sa.max_runtime_seconds = std::max(ce_result.elapsed_seconds, 1e-3);
    sa.max_iterations = 0;
  } else {
    // The temperature walk spends random_walk_steps evaluations of its own.
    sa.max_runtime_seconds = std::numeric_limits<double>::infinity();
    sa.max_iterations =
        std::max<std::int64_t>(1, ce_result.evaluations - sa.random_walk_steps);
  }
  const SaResult sa_result = anneal(space, objective, sa);

  out.ce_value = ce_result.value;
  out.sa_value = sa_result.value;
  out.efficiency =
      efficiency_from_values(ce_result.value, sa_result.value, model.num_params()).efficiency;
  out.ce_seconds = ce_result.elapsed_seconds;
  out.sa_seconds = sa_result.elapsed_seconds;
  out.ce_evaluations = ce_result.evaluations;
  out.sa_iterations = sa_result.iterations;
  out.sa_reheats = sa_result.reheats;
  out.ce_design = ce_result.design;
  out.sa_design = sa_result.design;
  return out;
}

std::vector<RaceScenario> expand_grid(const std::vector<int>& profiles_per_set,
                                      const std::vector<int>& num_constant,
                                      const std::vector<int>& interaction_params,
                                      const std::vector<double>& lambda,
                                      const std::vector<double>& kappa) {
  std::vector<RaceScenario> out;
  for (int j : profiles_per_set)
    for (int f : num_constant)
      for (int n : interaction_params)
        for (double l : lambda)
          for (double k : kappa) out.push_back({j, f, n, l, k});
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_race_csv(std::ostream& out, const std::vector<RaceScenario>& scenarios,
                    const std::vector<RaceResult>& results) {
  out << "scenario,replicate,profiles_per_set,num_constant,interaction_params,lambda,kappa,"
         "num_params,seed,ce_db,sa_db,efficiency,ce_seconds,sa_seconds,ce_evaluations,"
         "sa_iterations,sa_reheats\n";
  out.precision(17);
  std::vector<double> eff;
  for (const auto& r : results) {
    const RaceScenario& s = scenarios.at(r.scenario);
    out << r.scenario + 1 << ',' << r.replicate << ',' << s.profiles_per_set << ','
        << s.num_constant << ',' << s.interaction_params << ',' << s.lambda << ',' << s.kappa
        << ',' << r.num_params << ',' << r.seed << ',' << r.ce_value << ',' << r.sa_value
        << ',' << r.efficiency << ',' << r.ce_seconds << ',' << r.sa_seconds << ','
        << r.ce_evaluations << ',' << r.sa_iterations << ',' << r.sa_reheats << '\n';
    eff.push_back(r.efficiency);
  }
  out << "median,,,,,,,,,,," << median(eff) << ",,,,,\n";
}

}  // namespace ppd
