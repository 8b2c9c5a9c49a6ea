#ifndef PPD_CRITERION_HPP
#define PPD_CRITERION_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppd/model.hpp"
#include "ppd/prior.hpp"

namespace ppd {

enum class ModelTag { kMain, kInteraction, kRobust };

const char* to_string(ModelTag tag);
ModelTag model_tag_from_string(const std::string& name);

// Log-determinant scale; -infinity when any draw gives a singular matrix.
struct CriterionValue {
  double value = 0.0;
  int num_draws = 0;
  ModelTag tag = ModelTag::kMain;
};

// Choice probabilities for one choice set (rows of `coded_set` are the J
// profiles), using max-subtraction.
Eigen::VectorXd mnl_probabilities(const Eigen::MatrixXd& coded_set,
                                  const Eigen::VectorXd& beta);

// sum_s X_s'(P_s - p_s p_s')X_s
Eigen::MatrixXd information_matrix(const Design& design, const ModelSpec& model,
                                   const Eigen::VectorXd& beta);

double d_criterion(const Design& design, const ModelSpec& model,
                   const Eigen::VectorXd& beta);

// Mean of d_criterion over the draws, summed in draw order.
CriterionValue db_criterion(const Design& design, const ModelSpec& model,
                            const PriorDraws& draws);

struct EfficiencyResult {
  double efficiency = 1.0;
  double db_x = 0.0;
  double db_ref = 0.0;
  int num_params = 0;
  // Set when either criterion is -infinity.
  bool degenerate = false;
};

// exp((D_B(x) - D_B(ref)) / m) on common draws.
EfficiencyResult relative_db_efficiency(const Design& design_x, const Design& design_ref,
                                        const ModelSpec& model, const PriorDraws& draws);

EfficiencyResult efficiency_from_values(double db_x, double db_ref, int num_params);

// Main-effects and interaction-effects models for the composite criterion.
// The main model's parameters must be a prefix of the interaction model's.
struct RobustCriterionSpec {
  ModelSpec main_model;
  PriorSpec main_prior;
  ModelSpec interaction_model;
  PriorSpec interaction_prior;
  double main_weight = 1.0;
  double interaction_weight = 1.0;

  void check() const;
};

// w_main * D_main / m_main + w_int * D_int / m_int, each a Bayesian average.
CriterionValue robust_criterion(const Design& design, const RobustCriterionSpec& spec,
                                const PriorDraws& draws_main, const PriorDraws& draws_int);

// One Bayesian D term of an optimization objective.
struct ObjectiveTerm {
  ModelSpec model;
  Eigen::MatrixXd draws;  // R x m
  double weight = 1.0;
};

// Weighted sum of Bayesian D terms; what the optimizers maximize.
class Objective {
 public:
  Objective() = default;
  Objective(std::vector<ObjectiveTerm> terms, ModelTag tag);

  static Objective bayesian(const ModelSpec& model, const PriorDraws& draws);
  static Objective robust(const RobustCriterionSpec& spec, const PriorDraws& draws_main,
                          const PriorDraws& draws_int);

  const std::vector<ObjectiveTerm>& terms() const { return terms_; }
  ModelTag tag() const { return tag_; }
  int num_attributes() const;

  // Union of the interaction pairs of all terms.
  std::vector<AttributePair> interactions() const;

  // True iff no term's value can depend on the shared level of `attribute`
  // while it is constant in the set: it is in no interaction, or every
  // interaction partner is also constant there.
  bool independent_of_constant(int attribute, std::span<const bool> constant_in_set) const;

  double evaluate(const Design& design) const;

 private:
  std::vector<ObjectiveTerm> terms_;
  ModelTag tag_ = ModelTag::kMain;
};

// Per-draw, per-set information summands cached so a move that touches one
// choice set only recomputes that set.
class IncrementalEvaluator {
 public:
  IncrementalEvaluator(const Objective& objective, const Design& design);

  double value() const { return value_; }
  const Design& design() const { return design_; }

  // Criterion of the design with set `set` replaced by `set_levels`
  // (J*K levels, profile-major). Does not change state.
  double propose(int set, std::span<const int> set_levels);

  // Installs the last proposal.
  void commit();

  void reset(const Design& design);

  // Recomputes every total from the cached summands.
  void resync();

 private:
  struct TermCache {
    int m = 0;
    std::vector<double> summands;  // [draw][set][m*m]
    std::vector<double> totals;    // [draw][m*m]
    std::vector<double> log_dets;  // [draw]
    std::vector<double> proposed;  // [draw][m*m]
    std::vector<double> proposed_log_dets;
    double value = 0.0;
    double proposed_value = 0.0;
  };

  double* summand(TermCache& cache, int draw, int set) {
    return cache.summands.data() +
           (static_cast<std::size_t>(draw) * num_sets_ + set) * cache.m * cache.m;
  }

  void recompute_totals(std::size_t term);
  double combine(bool proposed) const;

  const Objective* objective_;
  Design design_;
  int num_sets_ = 0;
  std::vector<TermCache> caches_;
  double value_ = 0.0;
  int proposed_set_ = -1;
  std::vector<int> proposed_levels_;
  double proposed_value_ = 0.0;
  int commits_since_resync_ = 0;
  std::vector<double> scratch_;
  std::vector<double> coded_;
  std::vector<double> probs_;
};

namespace detail {

// Information summand of one choice set with coded rows `x` (J x m,
// row-major): writes sum_j p_j (x_j - xbar)(x_j - xbar)' into `out` (m x m,
// row-major, fully overwritten) and the probabilities into `probs`.
// Columns that are identical across the J rows contribute exact zeros.
void set_information(const double* x, int j_count, int m, const double* beta,
                     double* out, double* probs);

}  // namespace detail

}  // namespace ppd

#endif  // PPD_CRITERION_HPP
