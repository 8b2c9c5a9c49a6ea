#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "ppd/benchmark.hpp"
#include "ppd/error.hpp"
#include "ppd/scenarios.hpp"

using namespace ppd;

TEST_CASE("scenario interactions match the benchmark counts") {
  for (int n : {0, 2, 6, 8})
    CHECK(scenario_interactions(benchmark_levels(), n) == benchmark_interactions(n));
  CHECK_THROWS_AS(scenario_interactions(benchmark_levels(), 4), Error);
  // A 3-level first attribute doubles every count.
  CHECK(scenario_interactions({3, 2, 3}, 2) == std::vector<AttributePair>{{0, 1}});
  CHECK(scenario_interactions({3, 2, 3}, 6).size() == 2);
}

TEST_CASE("grid expansion and median") {
  const auto grid = expand_grid({2, 3}, {1, 2}, {0, 2, 6, 8}, {1, 0.5, 1.0 / 3}, {1, 0.5, 1.0 / 3});
  CHECK(grid.size() == 144);
  CHECK(grid.back().profiles_per_set == 3);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("evaluation-matched races are reproducible") {
  RaceConfig cfg;
  cfg.num_sets = 12;
  cfg.draws = 8;
  cfg.ce.num_starts = 1;
  cfg.ce.master_restarts = 2;
  cfg.match = BudgetMatch::kEvaluations;
  cfg.seed = 5;
  const RaceScenario scenario{2, 1, 0, 1.0, 1.0};
  const RaceResult a = run_race(scenario, cfg, 0);
  const RaceResult b = run_race(scenario, cfg, 0);
  CHECK(a.ce_design == b.ce_design);
  CHECK(a.sa_design == b.sa_design);
  CHECK(a.efficiency == b.efficiency);
  CHECK(a.num_params == 9);
  CHECK(a.sa_iterations == a.ce_evaluations - cfg.sa.random_walk_steps);
  CHECK(a.efficiency == doctest::Approx(std::exp((a.ce_value - a.sa_value) / 9)));
  CHECK(validate_design(a.sa_design, DesignSpace(12, 2, benchmark_levels(), 1)).ok());

  std::ostringstream csv;
  const std::vector<RaceScenario> scenarios{scenario, {2, 1, 0, 1.0, 0.5}};
  RaceResult c = a;
  c.scenario = 1;
  write_race_csv(csv, scenarios, {a, c});
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("\nmedian,") != std::string::npos);
}
