#ifndef PPD_MASTER_DESIGN_HPP
#define PPD_MASTER_DESIGN_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ppd {

class Design;
class DesignSpace;

// S x K incidence: varies(s, i) is true iff attribute i varies in set s.
//
// Stage one of the two-stage baseline treats each choice set as a block of a
// two-way ANOVA model and the varying attributes as its treatments.
class MasterDesign {
 public:
  MasterDesign() = default;
  MasterDesign(int num_sets, int num_attributes);
  explicit MasterDesign(const std::vector<std::vector<int>>& incidence);

  // Constant-attribute pattern of an existing design.
  static MasterDesign from_design(const Design& design);

  int num_sets() const { return num_sets_; }
  int num_attributes() const { return num_attributes_; }
  bool varies(int set, int attribute) const {
    return cells_[set * num_attributes_ + attribute] != 0;
  }
  void set_varies(int set, int attribute, bool value) {
    cells_[set * num_attributes_ + attribute] = value ? 1 : 0;
  }
  int row_sum(int set) const;
  // Number of sets in which each attribute varies.
  std::vector<int> replications() const;

  friend bool operator==(const MasterDesign&, const MasterDesign&) = default;

 private:
  int num_sets_ = 0;
  int num_attributes_ = 0;
  std::vector<unsigned char> cells_;
};

// Treatment matrix Q (r x t) and block matrix Z (r x (S-1)) of the surrogate
// ANOVA model. Block effects sum to zero, so rows of the last block are all -1. Rows enumerate (set, varying
// attribute) pairs in set-major, attribute-ascending order.
struct AnovaModel {
  Eigen::MatrixXd treatments;
  Eigen::MatrixXd blocks;
};

AnovaModel anova_model(const MasterDesign& master);

// [[Q'Q, Q'Z], [Z'Q, Z'Z]]
Eigen::MatrixXd anova_information(const MasterDesign& master);

// diag({Q'(I - Z(Z'Z)^-1 Z')Q}^-1); throws kSingularMaster if the reduced
// matrix is singular.
Eigen::VectorXd treatment_variances(const MasterDesign& master);

enum class VarianceBalance { kI, kII };

// Scheme I: (d_i - 1) / sum_j (d_j - 1). Scheme II: (d_i - 1)^2 / (2 d_i).
Eigen::VectorXd variance_balance_weights(const std::vector<int>& levels,
                                         VarianceBalance scheme);

struct MasterObjective {
  enum class Kind { kDOptimal, kAWeighted };
  Kind kind = Kind::kAWeighted;
  VarianceBalance scheme = VarianceBalance::kII;

  static MasterObjective d_optimal() { return {Kind::kDOptimal, VarianceBalance::kII}; }
  static MasterObjective a_weighted(VarianceBalance s) { return {Kind::kAWeighted, s}; }
};

// Objective on a "larger is better" scale: log|M| for D-optimality and
// -sum_i w_i Var(alpha_i) for weighted A-optimality. Singular masters score
// -infinity.
double master_score(const MasterDesign& master, const MasterObjective& objective,
                    const std::vector<int>& levels);

inline constexpr int kDefaultMasterRestarts = 50;

struct MasterSearchResult {
  MasterDesign master;
  double score = 0.0;
  int best_restart = 0;
};

// Multi-start first-improvement hill climbing over swaps of one varying and
// one constant attribute within a set.
MasterSearchResult optimize_master(const DesignSpace& space,
                                   const MasterObjective& objective,
                                   std::uint64_t seed,
                                   int restarts = kDefaultMasterRestarts);

}  // namespace ppd

#endif  // PPD_MASTER_DESIGN_HPP
