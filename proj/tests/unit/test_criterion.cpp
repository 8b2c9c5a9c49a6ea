#include <doctest.h>

#include <cmath>
#include <limits>

#include "ppd/criterion.hpp"
#include "ppd/error.hpp"
#include "ppd/linalg.hpp"
#include "ppd/rng.hpp"

using namespace ppd;

namespace {

const std::vector<int> kGridLevels{2, 2, 2, 3, 3, 3};

DesignSpace grid_space(int j = 2, int f = 1) { return DesignSpace(24, j, kGridLevels, f); }

Eigen::VectorXd random_beta(int m, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = rng.normal();
  return b;
}

// One respondent per set choosing profile `chosen[s]`.
double log_likelihood(const Design& d, const ModelSpec& model, const Eigen::VectorXd& beta,
                      const std::vector<int>& chosen) {
  double ll = 0.0;
  for (int s = 0; s < d.num_sets(); ++s)
    ll += std::log(mnl_probabilities(coded_set(d, s, model), beta)(chosen[s]));
  return ll;
}

}  // namespace

TEST_CASE("choice probabilities") {
  Eigen::MatrixXd x(2, 1);
  x << 1, 0;
  Eigen::VectorXd p = mnl_probabilities(x, Eigen::VectorXd::Zero(1));
  CHECK(p(0) == doctest::Approx(0.5));
  p = mnl_probabilities(x, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(p(0) == doctest::Approx(0.73106).epsilon(1e-5));
  CHECK(p(1) == doctest::Approx(0.26894).epsilon(1e-5));
  p = mnl_probabilities(x, Eigen::VectorXd::Constant(1, 700.0));
  CHECK(p(0) == 1.0);
  CHECK(p(1) == doctest::Approx(9.86e-305).epsilon(1e-3));
  CHECK(std::isfinite(p(1)));

  Eigen::MatrixXd y(3, 2);
  y << 1, 0, 0, 1, -1, -1;
  const Eigen::VectorXd b = random_beta(2, 1);
  const Eigen::VectorXd q = mnl_probabilities(y, b);
  CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // A common shift of every utility changes nothing.
  Eigen::MatrixXd z(3, 3);
  z << y, Eigen::Vector3d::Ones();
  Eigen::Vector3d bz(b(0), b(1), 5.0);
  CHECK((mnl_probabilities(z, bz) - q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-set information") {
  Design d(1, 2, 1);
  d.at(0, 1, 0) = 2;
  const ModelSpec model({2});
  const Eigen::MatrixXd m = information_matrix(d, model, Eigen::VectorXd::Zero(1));
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(d_criterion(d, model, Eigen::VectorXd::Zero(1)) == doctest::Approx(0.0));
  CHECK(db_criterion(d, model, point_prior(Eigen::VectorXd::Zero(1))).value ==
        doctest::Approx(0.0));
}

TEST_CASE("information equals negative Hessian of the log-likelihood") {
  const ModelSpec model(kGridLevels, {{0, 1}, {0, 3}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Design d = random_design(grid_space(3, 1), seed);
    const Eigen::VectorXd beta = random_beta(model.num_params(), seed + 100);
    std::vector<int> chosen(d.num_sets());
    for (int s = 0; s < d.num_sets(); ++s) chosen[s] = s % 3;
    const Eigen::MatrixXd info = information_matrix(d, model, beta);
    const int m = model.num_params();
    const double h = 1e-4;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b <= a; ++b) {
        auto f = [&](double da, double db) {
          Eigen::VectorXd x = beta;
          x(a) += da;
          x(b) += db;
          return log_likelihood(d, model, x, chosen);
        };
        const double hess = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
        CHECK(-hess == doctest::Approx(info(a, b)).epsilon(1e-5).scale(1.0));
      }
  }
}

TEST_CASE("criterion scaling and singularity") {
  const DesignSpace space = grid_space();
  const ModelSpec model(kGridLevels);
  const Design d = random_design(space, 3);
  const Eigen::VectorXd beta = random_beta(9, 9);
  std::vector<int> twice;
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 24; ++s) twice.push_back(s);
  const double single = d_criterion(d, model, beta);
  CHECK(d_criterion(d.subset(twice), model, beta) ==
        doctest::Approx(single + 9 * std::log(2.0)));

  // Attribute 0 never varies.
  Design flat = d;
  for (int s = 0; s < 24; ++s)
    for (int j = 0; j < 2; ++j) flat.at(s, j, 0) = 1;
  CHECK(d_criterion(flat, model, beta) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("constant attribute is invisible to main effects") {
  const DesignSpace space = grid_space(3, 2);
  const ModelSpec model(kGridLevels);
  const Eigen::VectorXd beta = random_beta(9, 4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Design d = random_design(space, seed);
    const double before = d_criterion(d, model, beta);
    Design e = d;
    const int k = e.constant_attributes(0)[0];
    const int lv = e.at(0, 0, k) % kGridLevels[k] + 1;
    for (int j = 0; j < 3; ++j) e.at(0, j, k) = lv;
    CHECK(d_criterion(e, model, beta) == before);
  }
}

TEST_CASE("information is invariant to profile order") {
  const ModelSpec model(kGridLevels, {{0, 4}});
  const Design d = random_design(grid_space(3, 1), 6);
  Design p = d;
  for (int s = 0; s < d.num_sets(); ++s)
    for (int k = 0; k < 6; ++k) std::swap(p.at(s, 0, k), p.at(s, 2, k));
  const Eigen::VectorXd beta = random_beta(model.num_params(), 2);
  CHECK((information_matrix(d, model, beta) - information_matrix(p, model, beta))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("adding a choice set never lowers the Bayesian criterion") {
  const ModelSpec model(kGridLevels);
  const Design d = random_design(grid_space(), 8);
  PriorSpec prior{Eigen::VectorXd::Zero(9), Eigen::MatrixXd::Identity(9, 9)};
  const PriorDraws draws = sample_prior(prior, 32, 1);
  std::vector<int> sets;
  double last = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 24; ++s) {
    sets.push_back(s);
    const double v = db_criterion(d.subset(sets), model, draws).value;
    if (std::isfinite(last)) CHECK(v >= last - 1e-12);
    last = v;
  }
}

TEST_CASE("relative efficiency") {
  const ModelSpec model(kGridLevels);
  const Design a = random_design(grid_space(), 1);
  const Design b = random_design(grid_space(), 2);
  PriorSpec prior{Eigen::VectorXd::Zero(9), Eigen::MatrixXd::Identity(9, 9)};
  const PriorDraws draws = sample_prior(prior, 16, 3);
  CHECK(relative_db_efficiency(a, a, model, draws).efficiency == 1.0);
  CHECK(efficiency_from_values(9.0, 0.0, 9).efficiency == doctest::Approx(std::exp(1.0)));
  const double inf = std::numeric_limits<double>::infinity();
  const auto zero = efficiency_from_values(-inf, 1.0, 9);
  CHECK(zero.degenerate);
  CHECK(zero.efficiency == 0.0);
  CHECK(std::isinf(efficiency_from_values(1.0, -inf, 9).efficiency));
  const double eab = relative_db_efficiency(a, b, model, draws).efficiency;
  const double eba = relative_db_efficiency(b, a, model, draws).efficiency;
  CHECK(eab * eba == doctest::Approx(1.0));
}

TEST_CASE("robust criterion") {
  const ModelSpec main(kGridLevels);
  const ModelSpec inter(kGridLevels, {{0, 1}, {0, 3}});
  PriorSpec pm{Eigen::VectorXd::Zero(9), Eigen::MatrixXd::Identity(9, 9)};
  PriorSpec pi{Eigen::VectorXd::Zero(12), Eigen::MatrixXd::Identity(12, 12)};
  const PriorDraws dm = sample_prior(pm, 16, 1);
  const PriorDraws di = sample_prior(pi, 16, 1);
  const Design d = random_design(grid_space(), 4);

  // Collapses to twice the normalized main criterion.
  const RobustCriterionSpec same{main, pm, main, pm};
  CHECK(robust_criterion(d, same, dm, dm).value ==
        doctest::Approx(2 * db_criterion(d, main, dm).value / 9));

  const RobustCriterionSpec spec{main, pm, inter, pi};
  const double v = robust_criterion(d, spec, dm, di).value;
  CHECK(v == doctest::Approx(db_criterion(d, main, dm).value / 9 +
                             db_criterion(d, inter, di).value / 12));
  CHECK(Objective::robust(spec, dm, di).evaluate(d) == doctest::Approx(v).epsilon(1e-12));

  const RobustCriterionSpec bad{inter, pi, main, pm};
  CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("independence of a constant attribute") {
  const ModelSpec inter(kGridLevels, {{0, 3}});
  PriorSpec pi{Eigen::VectorXd::Zero(11), Eigen::MatrixXd::Identity(11, 11)};
  const Objective obj = Objective::bayesian(inter, sample_prior(pi, 4, 2));
  bool constant[6] = {false, false, false, false, false, false};
  CHECK(obj.independent_of_constant(1, constant));
  CHECK_FALSE(obj.independent_of_constant(0, constant));
  constant[3] = true;
  CHECK(obj.independent_of_constant(0, constant));
}

TEST_CASE("incremental evaluation tracks full recompute") {
  const DesignSpace space = grid_space(2, 1);
  const ModelSpec model(kGridLevels, {{0, 1}, {0, 3}});
  PriorSpec prior{Eigen::VectorXd::Zero(12), Eigen::MatrixXd::Identity(12, 12)};
  const Objective obj = Objective::bayesian(model, sample_prior(prior, 8, 5));
  Design d = random_design(space, 12);
  IncrementalEvaluator eval(obj, d);
  CHECK(eval.value() == doctest::Approx(obj.evaluate(d)).epsilon(1e-12));
  Rng rng(1);
  for (int move = 0; move < 300; ++move) {
    const int s = rng.uniform_int(0, 23);
    Design candidate = random_design(space, 1000 + move);
    const double proposed = eval.propose(s, candidate.set_levels(s));
    Design full = eval.design();
    std::copy(candidate.set_levels(s).begin(), candidate.set_levels(s).end(),
              full.set_levels(s).begin());
    const double direct = obj.evaluate(full);
    CHECK(std::abs(proposed - direct) <= 1e-10);
    if (rng.bernoulli(0.5)) {
      eval.commit();
      CHECK(eval.design() == full);
    }
  }
}

TEST_CASE("log determinant") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 2, 0, 2, 3, 1, 0, 1, 2;
  CHECK(log_det_psd(a) == doctest::Approx(std::log(a.determinant())));
  Eigen::MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  CHECK(log_det_psd(s) == -std::numeric_limits<double>::infinity());
}
