#include <doctest.h>

#include <sstream>

#include "ppd/coordinate_exchange.hpp"
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

}  // namespace

TEST_CASE("exchange keeps the master and never gets worse") {
  const DesignSpace space(12, 2, kGridLevels, 2);
  const ModelSpec model(kGridLevels, {{0, 1}});
  const Objective obj = grid_objective(model);
  const MasterDesign master = MasterDesign::from_design(random_design(space, 1));
  const Design start = random_conforming_design(space, master, 2);
  const CeRun run = restricted_coordinate_exchange(start, master, space, obj);
  CHECK(validate_design(run.design, space).ok());
  CHECK(MasterDesign::from_design(run.design) == master);
  for (std::size_t i = 1; i < run.trace.size(); ++i)
    CHECK(run.trace[i].criterion >= run.trace[i - 1].criterion);
  CHECK(run.value >= obj.evaluate(start));
  CHECK(run.value == doctest::Approx(obj.evaluate(run.design)));

  // A local optimum is a fixed point.
  const CeRun again = restricted_coordinate_exchange(run.design, master, space, obj);
  CHECK(again.design == run.design);
  CHECK(again.cycles == 1);
  CHECK(again.exchanges == 0);
}

TEST_CASE("exchange rejects a start that does not follow the master") {
  const DesignSpace space(12, 2, kGridLevels, 1);
  const Objective obj = grid_objective(ModelSpec(kGridLevels));
  const Design a = random_design(space, 1);
  MasterDesign other = MasterDesign::from_design(random_design(space, 2));
  if (other == MasterDesign::from_design(a))
    other = MasterDesign::from_design(random_design(space, 3));
  try {
    restricted_coordinate_exchange(a, other, space, obj);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidStart);
  }
}

TEST_CASE("two-stage baseline") {
  const DesignSpace space(12, 2, kGridLevels, 1);
  const Objective obj = grid_objective(ModelSpec(kGridLevels));
  CeConfig config;
  config.num_starts = 3;
  config.seed = 5;
  config.master_restarts = 5;
  const TwoStageResult r = two_stage_ce(space, obj, config);
  CHECK(validate_design(r.design, space).ok());
  CHECK(MasterDesign::from_design(r.design) == r.master);
  for (const auto& s : r.starts) CHECK(r.value >= s.value);
  CHECK(r.elapsed_seconds > 0.0);

  const TwoStageResult again = two_stage_ce(space, obj, config);
  CHECK(again.design == r.design);

  config.threads = 2;
  CHECK(two_stage_ce(space, obj, config).design == r.design);

  std::ostringstream csv;
  write_ce_trace_csv(csv, r.trace);
  CHECK(csv.str().rfind("start,cycle,criterion,elapsed_ms\n", 0) == 0);
}

TEST_CASE("no constant attributes reduces to plain exchange") {
  const DesignSpace space(8, 2, {2, 3, 3}, 0);
  const Objective obj = grid_objective(ModelSpec({2, 3, 3}));
  CeConfig config;
  config.num_starts = 2;
  config.master_restarts = 2;
  const TwoStageResult r = two_stage_ce(space, obj, config);
  for (int s = 0; s < 8; ++s)
    for (int k = 0; k < 3; ++k) CHECK(r.master.varies(s, k));
  CHECK(validate_design(r.design, space).ok());
}

TEST_CASE("forbidden profiles are never produced") {
  const DesignSpace space(10, 2, {2, 3, 3, 3}, 1, {{{{0, 2}, {1, 1}}}, {{{2, 3}, {3, 3}}}});
  const Objective obj = grid_objective(ModelSpec({2, 3, 3, 3}));
  CeConfig config;
  config.num_starts = 3;
  config.master_restarts = 3;
  const TwoStageResult r = two_stage_ce(space, obj, config);
  CHECK(validate_design(r.design, space).ok());
}
