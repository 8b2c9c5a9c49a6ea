#ifndef PPD_SCENARIOS_HPP
#define PPD_SCENARIOS_HPP

#include <filesystem>
#include <vector>

#include "ppd/model.hpp"
#include "ppd/prior.hpp"

namespace ppd {

enum class InteractionPrior { kNaive, kExplicit };

// Main effects: implicit part-worths of a d-level attribute rise linearly
// from -lambda to +lambda; the first d-1 are the coded parameters. Each
// attribute's covariance block has kappa^2 on the diagonal and
// -kappa^2/(d-1) off it, so the omitted level also has variance kappa^2.
// Naive interactions get mean 0 and variance 1. kExplicit always throws
// kExplicitPriorRequired: those values have to come from the user.
PriorSpec build_prior_family(const std::vector<int>& levels,
                             const std::vector<AttributePair>& interactions, double lambda,
                             double kappa, InteractionPrior mode = InteractionPrior::kNaive);

// Leading main-effects block of a prior over a model with interactions.
PriorSpec main_block(const PriorSpec& prior, int num_main_params);

// Prior for `model` whose main block is `main` and whose interaction block
// has the given mean and variance on the diagonal.
PriorSpec extend_prior(const PriorSpec& main, int num_params, double interaction_mean,
                       double interaction_variance);

// Six attributes with levels 2,2,2,3,3,3 in 24 choice sets.
std::vector<int> benchmark_levels();
DesignSpace benchmark_space(int profiles_per_set, int num_constant);

// Attribute 1 crossed with the other 2-level attributes (2), with the 3-level
// attributes (6) or with all others (8). Counts are interaction parameters.
std::vector<AttributePair> benchmark_interactions(int num_interaction_params);

// The robust-design study: interactions of attribute 1 with attributes 2
// and 4.
std::vector<AttributePair> robust_study_interactions();

// Healthcare case study: 7 attributes, 42 sets of 2 profiles, 3 constant
// attributes, four excluded combinations.
std::vector<int> case_study_levels();
std::vector<ForbiddenCombination> case_study_forbidden();
DesignSpace case_study_space();
// x1 crossed with x2, x3, x4, x5 and x7.
std::vector<AttributePair> case_study_design_interactions();
// x1 crossed with x4 and x7.
std::vector<AttributePair> case_study_true_interactions();
PriorSpec case_study_main_prior();
// Main prior plus mean 0 and identity covariance on the design interactions.
PriorSpec case_study_robust_prior();
// Parameter vector of the true model (main effects then x1*x4, x1*x7).
Eigen::VectorXd case_study_true_beta();
// Standard deviations of the true interaction parameters.
Eigen::VectorXd case_study_true_interaction_sd();
// Three groups of 14 consecutive sets.
std::vector<std::vector<int>> case_study_groups();

// The published case-study design, shipped under the data directory.
std::filesystem::path data_dir();
Design case_study_original_design();

}  // namespace ppd

#endif  // PPD_SCENARIOS_HPP
