#ifndef PPD_SIMULATION_HPP
#define PPD_SIMULATION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppd/model.hpp"

namespace ppd {

// Respondents see every set of their survey group once; groups partition
// the choice sets.
struct SimulationPlan {
  Design design;
  std::vector<std::vector<int>> groups;  // empty: one group of all sets
  int respondents_per_group = 100;
  ModelSpec true_model;
  Eigen::VectorXd true_beta;
  int num_replications = 500;
  std::uint64_t seed = 0;

  void check() const;
  // Respondents assigned to each set.
  std::vector<int> set_respondents() const;
};

// S x J choice counts, row-major.
struct ChoiceCounts {
  int num_sets = 0;
  int profiles_per_set = 0;
  std::vector<int> counts;

  int at(int set, int profile) const { return counts[set * profiles_per_set + profile]; }
};

// One replication: each respondent picks one profile per assigned set.
// Respondent draws come from derive_seed(plan.seed, replication) in
// (respondent, set) order, so designs of equal shape share them.
ChoiceCounts simulate_choices(const SimulationPlan& plan, int replication);

inline constexpr double kGradientTolerance = 1e-8;
inline constexpr int kMaxNewtonIterations = 100;
inline constexpr double kHessianRidge = 1e-8;
// A fitted choice probability this small in an observed set means the
// likelihood keeps rising toward infinity (separation).
inline constexpr double kSeparationProbability = 1e-8;

struct EstimationResult {
  Eigen::VectorXd beta_hat;
  bool converged = false;
  double log_likelihood = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;  // max-norm
  bool ridge_added = false;
  bool separated = false;
};

// Sum_s sum_j y_sj log p_sj, with its gradient and Hessian when asked.
double mnl_log_likelihood(const Design& design, const ModelSpec& model,
                          const ChoiceCounts& counts, const Eigen::VectorXd& beta,
                          Eigen::VectorXd* gradient = nullptr,
                          Eigen::MatrixXd* hessian = nullptr);

// Newton ascent from beta = 0 with step halving.
EstimationResult fit_mnl(const Design& design, const ModelSpec& model,
                         const ChoiceCounts& counts);

struct EmseResult {
  double emse = 0.0;
  int used = 0;
  int excluded = 0;
};

// Mean squared distance to truth over the converged rows.
EmseResult emse(const Eigen::MatrixXd& beta_hats, const std::vector<bool>& converged,
                const Eigen::VectorXd& true_beta);

struct DesignEntry {
  std::string id;
  Design design;
};

struct ReplicationError {
  std::string design_id;
  int replication = 0;
  double sq_error = 0.0;
  bool converged = false;
};

struct DesignEmse {
  std::string design_id;
  EmseResult result;
};

struct Comparison {
  std::vector<DesignEmse> summary;
  std::vector<ReplicationError> replications;
};

// `plan.design` is replaced by each entry's design; replication r uses the
// same respondent stream for every design. `fit_model` must contain every
// interaction of the true model; its other parameters are truly zero.
Comparison compare_designs(const std::vector<DesignEntry>& designs, const SimulationPlan& plan,
                           const ModelSpec& fit_model, int threads = 1);

void write_replication_csv(std::ostream& out, const std::vector<ReplicationError>& rows);

}  // namespace ppd

#endif  // PPD_SIMULATION_HPP
