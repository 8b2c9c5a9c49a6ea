#include "ppd/scenarios.hpp"

#include "ppd/design_io.hpp"
#include "ppd/error.hpp"

namespace ppd {

PriorSpec build_prior_family(const std::vector<int>& levels,
                             const std::vector<AttributePair>& interactions, double lambda,
                             double kappa, InteractionPrior mode) {
  if (mode == InteractionPrior::kExplicit && !interactions.empty())
    throw Error(ErrorKind::kExplicitPriorRequired,
                "explicit interaction priors must be given as mean and covariance");
  if (!(lambda > 0.0) || !(kappa > 0.0))
    throw Error(ErrorKind::kExplicitPriorRequired,
                "the prior family needs positive lambda and kappa");
  const ModelSpec model(levels, interactions);
  const int m = model.num_params();
  PriorSpec prior{Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m)};
  const double k2 = kappa * kappa;
  for (int a = 0; a < model.num_attributes(); ++a) {
    const int d = levels[a];
    const int off = model.main_offset(a);
    for (int l = 0; l < d - 1; ++l) {
      prior.mean(off + l) = -lambda + 2.0 * lambda * l / (d - 1);
      for (int c = 0; c < d - 1; ++c)
        prior.covariance(off + l, off + c) = l == c ? k2 : -k2 / (d - 1);
    }
  }
  for (int p = model.num_main_params(); p < m; ++p) prior.covariance(p, p) = 1.0;
  return prior;
}

PriorSpec main_block(const PriorSpec& prior, int num_main_params) {
  return {prior.mean.head(num_main_params),
          prior.covariance.topLeftCorner(num_main_params, num_main_params)};
}

PriorSpec extend_prior(const PriorSpec& main, int num_params, double interaction_mean,
                       double interaction_variance) {
  const int m0 = main.dim();
  PriorSpec out{Eigen::VectorXd::Constant(num_params, interaction_mean),
                Eigen::MatrixXd::Zero(num_params, num_params)};
  out.mean.head(m0) = main.mean;
  out.covariance.topLeftCorner(m0, m0) = main.covariance;
  for (int p = m0; p < num_params; ++p) out.covariance(p, p) = interaction_variance;
  return out;
}

std::vector<int> benchmark_levels() { return {2, 2, 2, 3, 3, 3}; }

DesignSpace benchmark_space(int profiles_per_set, int num_constant) {
  return DesignSpace(24, profiles_per_set, benchmark_levels(), num_constant);
}

std::vector<AttributePair> benchmark_interactions(int num_interaction_params) {
  switch (num_interaction_params) {
    case 0: return {};
    case 2: return {{0, 1}, {0, 2}};
    case 6: return {{0, 3}, {0, 4}, {0, 5}};
    case 8: return {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}};
  }
  throw Error(ErrorKind::kInvalidInput, "interaction count must be 0, 2, 6 or 8");
}

std::vector<AttributePair> robust_study_interactions() { return {{0, 1}, {0, 3}}; }

std::vector<int> case_study_levels() { return {2, 3, 3, 3, 3, 3, 5}; }

std::vector<ForbiddenCombination> case_study_forbidden() {
  return {{{{0, 2}, {5, 1}}}, {{{0, 2}, {5, 2}}}, {{{4, 1}, {6, 5}}}, {{{4, 2}, {6, 5}}}};
}

DesignSpace case_study_space() {
  return DesignSpace(42, 2, case_study_levels(), 3, case_study_forbidden());
}

std::vector<AttributePair> case_study_design_interactions() {
  return {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 6}};
}

std::vector<AttributePair> case_study_true_interactions() { return {{0, 3}, {0, 6}}; }

PriorSpec case_study_main_prior() {
  PriorSpec p{Eigen::VectorXd(15), Eigen::MatrixXd::Zero(15, 15)};
  p.mean << -0.4, -0.5, 0, -0.4, 0.1, -0.8, 0, -0.5, 0, -0.5, 0.2, -0.5, -0.25, 0, 0.25;
  p.covariance(0, 0) = 0.09;
  for (int b = 0; b < 5; ++b) {
    const int o = 1 + 2 * b;
    p.covariance(o, o) = p.covariance(o + 1, o + 1) = 0.09;
    p.covariance(o, o + 1) = p.covariance(o + 1, o) = -0.045;
  }
  for (int r = 11; r < 15; ++r)
    for (int c = 11; c < 15; ++c) p.covariance(r, c) = r == c ? 0.09 : -0.0225;
  return p;
}

PriorSpec case_study_robust_prior() {
  const ModelSpec model(case_study_levels(), case_study_design_interactions());
  return extend_prior(case_study_main_prior(), model.num_params(), 0.0, 1.0);
}

Eigen::VectorXd case_study_true_beta() {
  Eigen::VectorXd beta(21);
  beta.head(15) = case_study_main_prior().mean;
  beta.tail(6) << -0.0431, 0.0345, 0.012, -0.0676, -0.048, 0.1103;
  return beta;
}

Eigen::VectorXd case_study_true_interaction_sd() {
  Eigen::VectorXd sd(6);
  sd << 0.0378, 0.0394, 0.0528, 0.0524, 0.0558, 0.0578;
  return sd;
}

std::vector<std::vector<int>> case_study_groups() {
  std::vector<std::vector<int>> groups(3);
  for (int g = 0; g < 3; ++g)
    for (int s = 0; s < 14; ++s) groups[g].push_back(14 * g + s);
  return groups;
}

std::filesystem::path data_dir() {
#ifdef PPD_DATA_DIR
  return PPD_DATA_DIR;
#else
  return "data";
#endif
}

Design case_study_original_design() {
  return load_design(data_dir() / "case_study_original.csv");
}

}  // namespace ppd
