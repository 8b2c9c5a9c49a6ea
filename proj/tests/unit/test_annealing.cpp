#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ppd/annealing.hpp"
#include "ppd/error.hpp"

using namespace ppd;

namespace {

const std::vector<int> kGridLevels{2, 2, 2, 3, 3, 3};

Objective grid_objective(const ModelSpec& model, int draws = 16) {
  const int m = model.num_params();
  PriorSpec prior{Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Identity(m, m)};
  prior.mean.head(4).setConstant(-1.0);
  return Objective::bayesian(model, sample_prior(prior, draws, 3));
}

int differing_cells(const Design& a, const Design& b) {
  int n = 0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) n += a.raw()[i] != b.raw()[i];
  return n;
}

}  // namespace

TEST_CASE("metropolis rule") {
  CHECK(metropolis_accept(0.0, 1.0, 0.999999));
  CHECK(metropolis_accept(2.0, 0.5, 0.999999));
  CHECK(metropolis_accept(-1.0, 1.0, 0.3678));
  CHECK_FALSE(metropolis_accept(-1.0, 1.0, 0.3680));
  CHECK_THROWS_AS(metropolis_accept(-1.0, 0.0, 0.5), Error);
}

TEST_CASE("explore keeps designs valid") {
  const DesignSpace space(24, 3, kGridLevels, 2);
  const std::vector<AttributePair> pairs{{0, 1}, {0, 3}};
  Design d = random_design(space, 1);
  Rng rng(2);
  ExploreStats stats;
  for (int i = 0; i < 2000; ++i) {
    const Move m = explore_move(d, space, pairs, 1.0 / 3, rng, &stats);
    std::copy(m.levels.begin(), m.levels.end(), d.set_levels(m.set).begin());
    REQUIRE(validate_design(d, space).ok());
  }
  CHECK(stats.moves == 2000);
  CHECK(stats.constant_randomized > 0);
  CHECK(stats.constant_independent > 0);
  CHECK(stats.varying > 0);
}

TEST_CASE("explore without constants touches one coordinate") {
  const DesignSpace space(10, 2, kGridLevels, 0);
  const Design d = random_design(space, 4);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ExploreStats stats;
    const Design e = explore(d, space, {}, 0.0, seed, &stats);
    CHECK(differing_cells(d, e) == 1);
    CHECK(stats.varying == 1);
    CHECK(stats.constant_independent + stats.constant_randomized + stats.constant_converted == 0);
  }
}

TEST_CASE("without interactions every constant pick is independent") {
  const DesignSpace space(24, 2, kGridLevels, 2);
  Design d = random_design(space, 5);
  Rng rng(6);
  ExploreStats stats;
  for (int i = 0; i < 3000; ++i) {
    const Move m = explore_move(d, space, {}, 1.0, rng, &stats);
    std::copy(m.levels.begin(), m.levels.end(), d.set_levels(m.set).begin());
  }
  CHECK(stats.constant_independent > 0);
  CHECK(stats.constant_randomized == 0);
  CHECK(stats.constant_converted == 0);
}

TEST_CASE("gamma zero never redraws a constant level") {
  const DesignSpace space(24, 2, kGridLevels, 2);
  const std::vector<AttributePair> pairs{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}};
  Design d = random_design(space, 7);
  Rng rng(8);
  ExploreStats stats;
  for (int i = 0; i < 3000; ++i) {
    const Move m = explore_move(d, space, pairs, 0.0, rng, &stats);
    std::copy(m.levels.begin(), m.levels.end(), d.set_levels(m.set).begin());
  }
  CHECK(stats.constant_randomized == 0);
  CHECK(stats.constant_converted > 0);
}

TEST_CASE("initial temperature") {
  const DesignSpace space(12, 2, kGridLevels, 1);
  const Objective obj = grid_objective(ModelSpec(kGridLevels));
  const Design start = random_design(space, 1);
  const InitialTemperature t = initial_temperature(start, space, obj, 1.0 / 6, 50, 2);
  CHECK(t.t0 > 0.0);
  CHECK(std::isfinite(t.t0));
  CHECK_FALSE(t.fallback);
  CHECK(t.t0 == doctest::Approx(t.mean_abs_delta / -std::log(0.8)));
  CHECK(initial_temperature(start, space, obj, 1.0 / 6, 50, 2).t0 == t.t0);

  // Too few sets to identify the model: every step scores -infinity.
  const DesignSpace tiny(2, 2, kGridLevels, 1);
  const InitialTemperature f =
      initial_temperature(random_design(tiny, 3), tiny, obj, 1.0 / 6, 20, 1);
  CHECK(f.fallback);
  CHECK(f.t0 == 1.0);
}

TEST_CASE("annealing run") {
  const DesignSpace space(12, 2, kGridLevels, 1);
  const Objective obj = grid_objective(ModelSpec(kGridLevels, {{0, 3}}), 8);
  SaConfig config;
  config.seed = 11;
  config.reheat_stall = 200;
  config.stopping = StoppingRule::kMaxReheats;
  config.max_reheats = 3;
  const SaResult r = anneal(space, obj, config);
  CHECK(validate_design(r.design, space).ok());
  CHECK(r.reheats == 3);
  CHECK(r.value >= obj.evaluate(r.start));
  CHECK(r.value == doctest::Approx(obj.evaluate(r.design)));
  double last_best = -INFINITY;
  for (const auto& row : r.trace) {
    CHECK(row.best >= last_best);
    last_best = row.best;
  }
  CHECK(r.trace.back().best == doctest::Approx(r.value).epsilon(1e-9));

  const SaResult again = anneal(space, obj, config);
  CHECK(again.design == r.design);
  CHECK(again.iterations == r.iterations);
  REQUIRE(again.trace.size() == r.trace.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(again.trace[i].current == r.trace[i].current);
    CHECK(again.trace[i].temperature == r.trace[i].temperature);
  }
}

TEST_CASE("hyperbolic cooling restarts at each reheat") {
  const DesignSpace space(12, 2, kGridLevels, 1);
  const Objective obj = grid_objective(ModelSpec(kGridLevels), 4);
  SaConfig config;
  config.seed = 3;
  config.reheat_stall = 50;
  config.stopping = StoppingRule::kMaxReheats;
  config.max_reheats = 2;
  const SaResult r = anneal(space, obj, config);
  const double t0 = r.temperature.t0;
  std::int64_t k = 0;
  for (const auto& row : r.trace) {
    CHECK(row.temperature == doctest::Approx(t0 / (k + 1)));
    k = row.reheated ? 0 : k + 1;
  }
}

TEST_CASE("a singular chain still stops") {
  const DesignSpace tiny(2, 2, kGridLevels, 1);
  SaConfig config;
  config.reheat_stall = 20;
  const SaResult r = anneal(tiny, grid_objective(ModelSpec(kGridLevels), 2), config);
  CHECK(r.reheats >= 1);
  CHECK(std::isinf(r.value));
}

TEST_CASE("runtime budget") {
  const DesignSpace space(24, 2, kGridLevels, 1);
  const Objective obj = grid_objective(ModelSpec(kGridLevels), 8);
  SaConfig config;
  config.stopping = StoppingRule::kMaxRuntime;
  config.max_runtime_seconds = 0.3;
  config.trace_stride = 100;
  const SaResult r = anneal(space, obj, config);
  CHECK(r.elapsed_seconds >= 0.3);
  CHECK(r.elapsed_seconds < 0.35);
  std::ostringstream csv;
  write_sa_trace_csv(csv, r.trace);
  CHECK(csv.str().rfind("iteration,temperature,current_db,best_db,accepted,reheated\n", 0) == 0);
}
