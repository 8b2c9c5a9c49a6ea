#include <doctest.h>

#include <cmath>
#include <limits>

#include "ppd/error.hpp"
#include "ppd/master_design.hpp"
#include "ppd/model.hpp"

using namespace ppd;

namespace {

const std::vector<int> kGridLevels{2, 2, 2, 3, 3, 3};

}  // namespace

TEST_CASE("anova information blocks") {
  const MasterDesign m({{1, 1, 0}, {0, 1, 1}});
  const AnovaModel a = anova_model(m);
  CHECK(a.treatments.rows() == 4);
  CHECK(a.blocks.cols() == 1);
  const Eigen::MatrixXd info = anova_information(m);
  CHECK(info(0, 0) == 1.0);
  CHECK(info(1, 1) == 2.0);
  CHECK(info(2, 2) == 1.0);
  CHECK(info(0, 1) == 0.0);
}

TEST_CASE("treatment variances") {
  // Each pair of 3 attributes once: a balanced incomplete block design.
  const MasterDesign bibd({{1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  const Eigen::VectorXd v = treatment_variances(bibd);
  CHECK(v(0) == doctest::Approx(v(1)));
  CHECK(v(1) == doctest::Approx(v(2)));

  // Attribute 0 varies in five of six sets, attribute 3 in one.
  const MasterDesign uneven({{1, 1, 0, 0},
                             {1, 0, 1, 0},
                             {1, 0, 0, 1},
                             {1, 1, 0, 0},
                             {0, 1, 1, 0},
                             {1, 0, 1, 0}});
  const Eigen::VectorXd u = treatment_variances(uneven);
  CHECK(u(0) < u(3));

  const MasterDesign never({{1, 1, 0}, {1, 1, 0}});
  CHECK_THROWS_AS(treatment_variances(never), Error);
}

TEST_CASE("variance balance weights") {
  const Eigen::VectorXd w1 = variance_balance_weights(kGridLevels, VarianceBalance::kI);
  for (int i = 0; i < 3; ++i) CHECK(w1(i) == doctest::Approx(1.0 / 9));
  for (int i = 3; i < 6; ++i) CHECK(w1(i) == doctest::Approx(2.0 / 9));
  const Eigen::VectorXd w2 = variance_balance_weights({2, 3}, VarianceBalance::kII);
  CHECK(w2(0) == doctest::Approx(0.25));
  CHECK(w2(1) == doctest::Approx(2.0 / 3));
  const Eigen::VectorXd flat = variance_balance_weights({4, 4, 4}, VarianceBalance::kI);
  CHECK(flat(0) == doctest::Approx(flat(2)));
}

TEST_CASE("masters have the right row sums") {
  const DesignSpace space(24, 2, kGridLevels, 2);
  for (auto obj : {MasterObjective::d_optimal(), MasterObjective::a_weighted(VarianceBalance::kI),
                   MasterObjective::a_weighted(VarianceBalance::kII)}) {
    const MasterSearchResult r = optimize_master(space, obj, 3, 5);
    for (int s = 0; s < 24; ++s) CHECK(r.master.row_sum(s) == 4);
    CHECK(std::isfinite(r.score));
  }
}

TEST_CASE("small d-optimal master is balanced") {
  const DesignSpace space(3, 2, {2, 2, 2}, 1);
  const MasterSearchResult r = optimize_master(space, MasterObjective::d_optimal(), 1, 10);
  const std::vector<int> reps = r.master.replications();
  for (int c : reps) CHECK(c == 2);
}

TEST_CASE("scheme II keeps 3-level attributes varying") {
  const DesignSpace space(24, 2, kGridLevels, 1);
  const MasterSearchResult r =
      optimize_master(space, MasterObjective::a_weighted(VarianceBalance::kII), 5, 20);
  const std::vector<int> reps = r.master.replications();
  const int min_two = std::min({reps[0], reps[1], reps[2]});
  for (int i = 3; i < 6; ++i) CHECK(24 - reps[i] < 24 - min_two);
}

TEST_CASE("optimized master beats random masters") {
  const DesignSpace space(24, 2, kGridLevels, 2);
  const auto obj = MasterObjective::a_weighted(VarianceBalance::kII);
  const MasterSearchResult r = optimize_master(space, obj, 9, 10);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MasterDesign m = MasterDesign::from_design(random_design(space, seed));
    CHECK(r.score >= master_score(m, obj, kGridLevels));
  }
}

TEST_CASE("d-optimal score is invariant to relabeling equal-level attributes") {
  const MasterDesign m({{1, 1, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}});
  MasterDesign relabeled(4, 4);
  for (int s = 0; s < 4; ++s) {
    relabeled.set_varies(s, 0, m.varies(s, 2));
    relabeled.set_varies(s, 1, m.varies(s, 1));
    relabeled.set_varies(s, 2, m.varies(s, 0));
    relabeled.set_varies(s, 3, m.varies(s, 3));
  }
  const std::vector<int> levels{3, 3, 3, 3};
  CHECK(master_score(m, MasterObjective::d_optimal(), levels) ==
        doctest::Approx(master_score(relabeled, MasterObjective::d_optimal(), levels)));
}
