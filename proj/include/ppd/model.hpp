#ifndef PPD_MODEL_HPP
#define PPD_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ppd {

// Attribute indices are 0-based in code; levels are 1-based everywhere.
struct AttributeLevel {
  int attribute = 0;
  int level = 1;

  friend bool operator==(const AttributeLevel&, const AttributeLevel&) = default;
};

// A profile is forbidden when it matches every term of the combination.
struct ForbiddenCombination {
  std::vector<AttributeLevel> terms;

  bool matches(std::span<const int> profile) const;

  friend bool operator==(const ForbiddenCombination&,
                         const ForbiddenCombination&) = default;
};

class DesignSpace {
 public:
  DesignSpace(int num_choice_sets, int profiles_per_set,
              std::vector<int> attribute_levels, int num_constant_attributes,
              std::vector<ForbiddenCombination> forbidden = {});

  int num_choice_sets() const { return num_choice_sets_; }
  int profiles_per_set() const { return profiles_per_set_; }
  int num_attributes() const { return static_cast<int>(levels_.size()); }
  int num_constant_attributes() const { return num_constant_; }
  int profile_strength() const { return num_attributes() - num_constant_; }
  int levels(int attribute) const { return levels_[attribute]; }
  const std::vector<int>& attribute_levels() const { return levels_; }
  const std::vector<ForbiddenCombination>& forbidden() const {
    return forbidden_;
  }

  bool is_forbidden(std::span<const int> profile) const;

  // Copy with a different number of choice sets (used by survey-group
  // slicing and the monotonicity checks).
  DesignSpace with_num_sets(int num_choice_sets) const;

  friend bool operator==(const DesignSpace&, const DesignSpace&) = default;

 private:
  int num_choice_sets_;
  int profiles_per_set_;
  std::vector<int> levels_;
  int num_constant_;
  std::vector<ForbiddenCombination> forbidden_;
};

// S x J x K array of 1-based levels, stored set-major.
class Design {
 public:
  Design() = default;
  Design(int num_sets, int profiles_per_set, int num_attributes);

  int num_sets() const { return num_sets_; }
  int profiles_per_set() const { return profiles_; }
  int num_attributes() const { return attributes_; }

  int& at(int set, int profile, int attribute) {
    return levels_[index(set, profile, attribute)];
  }
  int at(int set, int profile, int attribute) const {
    return levels_[index(set, profile, attribute)];
  }

  std::span<const int> profile(int set, int profile) const {
    return {levels_.data() + index(set, profile, 0),
            static_cast<std::size_t>(attributes_)};
  }
  // The J*K block of one choice set, profile-major.
  std::span<int> set_levels(int set) {
    return {levels_.data() + index(set, 0, 0), set_size()};
  }
  std::span<const int> set_levels(int set) const {
    return {levels_.data() + index(set, 0, 0), set_size()};
  }
  std::size_t set_size() const {
    return static_cast<std::size_t>(profiles_) * attributes_;
  }

  bool is_constant(int set, int attribute) const;
  std::vector<int> constant_attributes(int set) const;
  int num_constant(int set) const;

  // Choice sets `sets` (in the given order) as a new design.
  Design subset(std::span<const int> sets) const;

  const std::vector<int>& raw() const { return levels_; }

  friend bool operator==(const Design&, const Design&) = default;

 private:
  std::size_t index(int set, int profile, int attribute) const {
    return (static_cast<std::size_t>(set) * profiles_ + profile) * attributes_ +
           attribute;
  }

  int num_sets_ = 0;
  int profiles_ = 0;
  int attributes_ = 0;
  std::vector<int> levels_;
};

struct AttributePair {
  int first = 0;
  int second = 0;

  friend bool operator==(const AttributePair&, const AttributePair&) = default;
};

// Effects-coded main effects for every attribute plus the listed two-way
// interactions.
//
// Column order: main-effect blocks by attribute (d_i - 1 columns each), then
// interaction blocks in declared order. An interaction block for (a, b) is
// row-major over the two coded blocks: column (u, v) = code_a[u] * code_b[v]
// at offset u * (d_b - 1) + v.
class ModelSpec {
 public:
  ModelSpec() = default;
  ModelSpec(std::vector<int> attribute_levels,
            std::vector<AttributePair> interactions = {});

  int num_params() const { return num_params_; }
  int num_main_params() const { return num_main_; }
  int num_attributes() const { return static_cast<int>(levels_.size()); }
  const std::vector<int>& attribute_levels() const { return levels_; }
  const std::vector<AttributePair>& interactions() const {
    return interactions_;
  }
  int main_offset(int attribute) const { return main_offsets_[attribute]; }
  int interaction_offset(int index) const {
    return interaction_offsets_[index];
  }

  // True iff the attribute appears in some declared interaction.
  bool in_interaction(int attribute) const;

  // Coded row for one profile; `out` has num_params() entries.
  void code_profile(std::span<const int> profile, std::span<double> out) const;

  // Human-readable column labels, e.g. "x1.1" or "x1.1*x4.2".
  std::vector<std::string> column_names() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  std::vector<int> levels_;
  std::vector<AttributePair> interactions_;
  std::vector<int> main_offsets_;
  std::vector<int> interaction_offsets_;
  int num_main_ = 0;
  int num_params_ = 0;
};

// Effects-type code of `level` (1-based) for a d-level attribute.
Eigen::VectorXd effects_code(int level, int num_levels);

// (S*J) x m model matrix, rows ordered (set, profile).
Eigen::MatrixXd model_matrix(const Design& design, const ModelSpec& model);

// J x m coded block of one choice set.
Eigen::MatrixXd coded_set(const Design& design, int set, const ModelSpec& model);

enum class ViolationKind {
  kShape,
  kLevelRange,
  kProfileStrength,
  kDuplicateProfile,
  kForbiddenCombination,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int set = -1;      // 0-based; -1 when not set-specific
  int profile = -1;  // 0-based; -1 when not profile-specific
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_design(const Design& design, const DesignSpace& space);

// Checks a single choice set (J*K levels, profile-major) against the Design
// invariants. Used by the optimizers on the set they touch.
bool valid_choice_set(std::span<const int> set_levels, const DesignSpace& space);

// Throws kInfeasibleSpace, naming the constraint, when no choice set can
// satisfy the distinct-profile or forbidden-combination rules. Spaces with
// more than a million profiles skip the forbidden-combination count.
void check_feasible(const DesignSpace& space);

// Resampling cap per choice set for random_design.
inline constexpr int kRandomDesignResampleCap = 10000;

Design random_design(const DesignSpace& space, std::uint64_t seed);

class MasterDesign;

// Random design whose constant-attribute pattern follows `master`.
Design random_conforming_design(const DesignSpace& space,
                                const MasterDesign& master, std::uint64_t seed);

}  // namespace ppd

#endif  // PPD_MODEL_HPP
