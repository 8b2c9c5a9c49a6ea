#include "ppd/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "ppd/error.hpp"
#include "ppd/master_design.hpp"
#include "ppd/rng.hpp"

namespace ppd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kInfeasibleSpace: return "infeasible space";
    case ErrorKind::kInvalidPrior: return "invalid prior";
    case ErrorKind::kSingularMaster: return "singular master design";
    case ErrorKind::kInfeasibleMaster: return "infeasible master design";
    case ErrorKind::kInvalidStart: return "invalid start";
    case ErrorKind::kStuckState: return "stuck state";
    case ErrorKind::kExplicitPriorRequired: return "explicit prior required";
    case ErrorKind::kNumerical: return "numerical failure";
    case ErrorKind::kConfig: return "config error";
  }
  return "error";
}

bool ForbiddenCombination::matches(std::span<const int> profile) const {
  return std::all_of(terms.begin(), terms.end(), [&](const AttributeLevel& t) {
    return profile[t.attribute] == t.level;
  });
}

DesignSpace::DesignSpace(int num_choice_sets, int profiles_per_set,
                         std::vector<int> attribute_levels,
                         int num_constant_attributes,
                         std::vector<ForbiddenCombination> forbidden)
    : num_choice_sets_(num_choice_sets),
      profiles_per_set_(profiles_per_set),
      levels_(std::move(attribute_levels)),
      num_constant_(num_constant_attributes),
      forbidden_(std::move(forbidden)) {
  if (num_choice_sets_ < 1)
    throw Error(ErrorKind::kInvalidInput, "num_choice_sets must be >= 1");
  if (profiles_per_set_ < 2)
    throw Error(ErrorKind::kInvalidInput, "profiles_per_set must be >= 2");
  if (levels_.empty())
    throw Error(ErrorKind::kInvalidInput, "at least one attribute required");
  for (int d : levels_)
    if (d < 2)
      throw Error(ErrorKind::kInvalidInput, "every attribute needs >= 2 levels");
  if (num_constant_ < 0 || num_constant_ >= num_attributes())
    throw Error(ErrorKind::kInvalidInput,
                "num_constant_attributes must satisfy 0 <= F < K");
  for (const auto& combo : forbidden_) {
    if (combo.terms.size() < 2)
      throw Error(ErrorKind::kInvalidInput,
                  "forbidden combinations need at least two terms");
    std::set<int> seen;
    for (const auto& t : combo.terms) {
      if (t.attribute < 0 || t.attribute >= num_attributes())
        throw Error(ErrorKind::kInvalidInput,
                    "forbidden combination references attribute " +
                        std::to_string(t.attribute + 1));
      if (t.level < 1 || t.level > levels_[t.attribute])
        throw Error(ErrorKind::kInvalidInput,
                    "forbidden combination references level " +
                        std::to_string(t.level) + " of attribute " +
                        std::to_string(t.attribute + 1));
      if (!seen.insert(t.attribute).second)
        throw Error(ErrorKind::kInvalidInput,
                    "forbidden combination repeats an attribute");
    }
  }
}

bool DesignSpace::is_forbidden(std::span<const int> profile) const {
  return std::any_of(forbidden_.begin(), forbidden_.end(),
                     [&](const auto& c) { return c.matches(profile); });
}

DesignSpace DesignSpace::with_num_sets(int num_choice_sets) const {
  return DesignSpace(num_choice_sets, profiles_per_set_, levels_, num_constant_,
                     forbidden_);
}

Design::Design(int num_sets, int profiles_per_set, int num_attributes)
    : num_sets_(num_sets),
      profiles_(profiles_per_set),
      attributes_(num_attributes),
      levels_(static_cast<std::size_t>(num_sets) * profiles_per_set *
                  num_attributes,
              1) {}

bool Design::is_constant(int set, int attribute) const {
  const int first = at(set, 0, attribute);
  for (int j = 1; j < profiles_; ++j)
    if (at(set, j, attribute) != first) return false;
  return true;
}

std::vector<int> Design::constant_attributes(int set) const {
  std::vector<int> out;
  for (int k = 0; k < attributes_; ++k)
    if (is_constant(set, k)) out.push_back(k);
  return out;
}

int Design::num_constant(int set) const {
  int n = 0;
  for (int k = 0; k < attributes_; ++k) n += is_constant(set, k) ? 1 : 0;
  return n;
}

Design Design::subset(std::span<const int> sets) const {
  Design out(static_cast<int>(sets.size()), profiles_, attributes_);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto src = set_levels(sets[i]);
    std::copy(src.begin(), src.end(), out.set_levels(static_cast<int>(i)).begin());
  }
  return out;
}

ModelSpec::ModelSpec(std::vector<int> attribute_levels,
                     std::vector<AttributePair> interactions)
    : levels_(std::move(attribute_levels)),
      interactions_(std::move(interactions)) {
  int offset = 0;
  for (int d : levels_) {
    if (d < 2)
      throw Error(ErrorKind::kInvalidInput, "every attribute needs >= 2 levels");
    main_offsets_.push_back(offset);
    offset += d - 1;
  }
  num_main_ = offset;
  const int k = num_attributes();
  std::set<std::pair<int, int>> seen;
  for (auto& pair : interactions_) {
    if (pair.first < 0 || pair.first >= k || pair.second < 0 || pair.second >= k)
      throw Error(ErrorKind::kInvalidInput,
                  "interaction references an unknown attribute");
    if (pair.first == pair.second)
      throw Error(ErrorKind::kInvalidInput, "self-interactions are not allowed");
    const auto key = std::minmax(pair.first, pair.second);
    if (!seen.insert(key).second)
      throw Error(ErrorKind::kInvalidInput, "duplicate interaction pair");
    interaction_offsets_.push_back(offset);
    offset += (levels_[pair.first] - 1) * (levels_[pair.second] - 1);
  }
  num_params_ = offset;
}

bool ModelSpec::in_interaction(int attribute) const {
  return std::any_of(interactions_.begin(), interactions_.end(),
                     [&](const AttributePair& p) {
                       return p.first == attribute || p.second == attribute;
                     });
}

namespace {

// Writes the effects code of `level` into out[0 .. d-2].
inline void write_code(int level, int d, double* out) {
  if (level == d) {
    for (int u = 0; u < d - 1; ++u) out[u] = -1.0;
  } else {
    for (int u = 0; u < d - 1; ++u) out[u] = 0.0;
    out[level - 1] = 1.0;
  }
}

}  // namespace

void ModelSpec::code_profile(std::span<const int> profile,
                             std::span<double> out) const {
  const int k = num_attributes();
  for (int a = 0; a < k; ++a)
    write_code(profile[a], levels_[a], out.data() + main_offsets_[a]);
  for (std::size_t p = 0; p < interactions_.size(); ++p) {
    const auto [a, b] = interactions_[p];
    const double* ca = out.data() + main_offsets_[a];
    const double* cb = out.data() + main_offsets_[b];
    double* dst = out.data() + interaction_offsets_[p];
    const int da = levels_[a] - 1;
    const int db = levels_[b] - 1;
    for (int u = 0; u < da; ++u)
      for (int v = 0; v < db; ++v) dst[u * db + v] = ca[u] * cb[v];
  }
}

std::vector<std::string> ModelSpec::column_names() const {
  std::vector<std::string> names;
  for (int a = 0; a < num_attributes(); ++a)
    for (int u = 1; u < levels_[a]; ++u)
      names.push_back("x" + std::to_string(a + 1) + "." + std::to_string(u));
  for (const auto& [a, b] : interactions_)
    for (int u = 1; u < levels_[a]; ++u)
      for (int v = 1; v < levels_[b]; ++v)
        names.push_back("x" + std::to_string(a + 1) + "." + std::to_string(u) +
                        "*x" + std::to_string(b + 1) + "." + std::to_string(v));
  return names;
}

Eigen::VectorXd effects_code(int level, int num_levels) {
  if (num_levels < 2)
    throw Error(ErrorKind::kInvalidInput, "num_levels must be >= 2");
  if (level < 1 || level > num_levels)
    throw Error(ErrorKind::kInvalidInput,
                "level " + std::to_string(level) + " outside 1.." +
                    std::to_string(num_levels));
  Eigen::VectorXd out(num_levels - 1);
  write_code(level, num_levels, out.data());
  return out;
}

Eigen::MatrixXd model_matrix(const Design& design, const ModelSpec& model) {
  const int rows = design.num_sets() * design.profiles_per_set();
  Eigen::MatrixXd x(rows, model.num_params());
  Eigen::VectorXd row(model.num_params());
  int r = 0;
  for (int s = 0; s < design.num_sets(); ++s)
    for (int j = 0; j < design.profiles_per_set(); ++j) {
      model.code_profile(design.profile(s, j), {row.data(), static_cast<std::size_t>(row.size())});
      x.row(r++) = row.transpose();
    }
  return x;
}

Eigen::MatrixXd coded_set(const Design& design, int set, const ModelSpec& model) {
  const int j_count = design.profiles_per_set();
  Eigen::MatrixXd x(j_count, model.num_params());
  Eigen::VectorXd row(model.num_params());
  for (int j = 0; j < j_count; ++j) {
    model.code_profile(design.profile(set, j), {row.data(), static_cast<std::size_t>(row.size())});
    x.row(j) = row.transpose();
  }
  return x;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kShape: return "shape";
    case ViolationKind::kLevelRange: return "level-range";
    case ViolationKind::kProfileStrength: return "profile-strength";
    case ViolationKind::kDuplicateProfile: return "duplicate-profile";
    case ViolationKind::kForbiddenCombination: return "forbidden-combination";
  }
  return "violation";
}

ValidationReport validate_design(const Design& design, const DesignSpace& space) {
  ValidationReport report;
  if (design.num_sets() != space.num_choice_sets() ||
      design.profiles_per_set() != space.profiles_per_set() ||
      design.num_attributes() != space.num_attributes()) {
    report.violations.push_back(
        {ViolationKind::kShape, -1, -1, "design shape does not match space"});
    return report;
  }
  const int k_count = space.num_attributes();
  const int j_count = space.profiles_per_set();
  for (int s = 0; s < design.num_sets(); ++s) {
    bool levels_ok = true;
    for (int j = 0; j < j_count; ++j)
      for (int k = 0; k < k_count; ++k) {
        const int level = design.at(s, j, k);
        if (level < 1 || level > space.levels(k)) {
          levels_ok = false;
          report.violations.push_back(
              {ViolationKind::kLevelRange, s, j,
               "attribute " + std::to_string(k + 1) + " has level " +
                   std::to_string(level)});
        }
      }
    if (!levels_ok) continue;

    const int constants = design.num_constant(s);
    if (constants != space.num_constant_attributes())
      report.violations.push_back(
          {ViolationKind::kProfileStrength, s, -1,
           std::to_string(constants) + " constant attributes, expected " +
               std::to_string(space.num_constant_attributes())});

    for (int j = 0; j < j_count; ++j)
      for (int j2 = j + 1; j2 < j_count; ++j2) {
        auto a = design.profile(s, j);
        auto b = design.profile(s, j2);
        if (std::equal(a.begin(), a.end(), b.begin()))
          report.violations.push_back(
              {ViolationKind::kDuplicateProfile, s, j2,
               "profiles " + std::to_string(j + 1) + " and " +
                   std::to_string(j2 + 1) + " are identical"});
      }

    for (int j = 0; j < j_count; ++j)
      if (space.is_forbidden(design.profile(s, j)))
        report.violations.push_back({ViolationKind::kForbiddenCombination, s, j,
                                     "profile matches a forbidden combination"});
  }
  return report;
}

bool valid_choice_set(std::span<const int> set_levels, const DesignSpace& space) {
  const int k_count = space.num_attributes();
  const int j_count = space.profiles_per_set();
  int constants = 0;
  for (int k = 0; k < k_count; ++k) {
    bool same = true;
    for (int j = 1; j < j_count && same; ++j)
      same = set_levels[j * k_count + k] == set_levels[k];
    constants += same ? 1 : 0;
  }
  if (constants != space.num_constant_attributes()) return false;
  for (int j = 0; j < j_count; ++j) {
    auto a = set_levels.subspan(j * k_count, k_count);
    if (space.is_forbidden(a)) return false;
    for (int j2 = j + 1; j2 < j_count; ++j2) {
      auto b = set_levels.subspan(j2 * k_count, k_count);
      if (std::equal(a.begin(), a.end(), b.begin())) return false;
    }
  }
  return true;
}

namespace {

// Draws one choice set given which attributes are constant.
void sample_set(const DesignSpace& space, const std::vector<bool>& constant,
                Rng& rng, std::span<int> out) {
  const int k_count = space.num_attributes();
  const int j_count = space.profiles_per_set();
  for (int k = 0; k < k_count; ++k) {
    if (constant[k]) {
      const int level = rng.uniform_int(1, space.levels(k));
      for (int j = 0; j < j_count; ++j) out[j * k_count + k] = level;
    } else {
      for (int j = 0; j < j_count; ++j)
        out[j * k_count + k] = rng.uniform_int(1, space.levels(k));
    }
  }
}

}  // namespace

void check_feasible(const DesignSpace& space) {
  const int j_count = space.profiles_per_set();
  std::vector<int> levels = space.attribute_levels();
  std::sort(levels.rbegin(), levels.rend());
  long long distinct = 1;
  for (int v = 0; v < space.profile_strength() && distinct < j_count; ++v) distinct *= levels[v];
  if (distinct < j_count)
    throw Error(ErrorKind::kInfeasibleSpace,
                "duplicate profiles: with " + std::to_string(space.profile_strength()) +
                    " varying attributes a set holds at most " + std::to_string(distinct) +
                    " distinct profiles, fewer than " + std::to_string(j_count));

  long long total = 1;
  for (int d : space.attribute_levels()) {
    total *= d;
    if (total > 1000000) return;
  }
  const int k_count = space.num_attributes();
  std::vector<int> profile(k_count, 1);
  long long allowed = 0;
  for (long long n = 0; n < total; ++n) {
    long long rest = n;
    for (int k = 0; k < k_count; ++k) {
      profile[k] = static_cast<int>(rest % space.levels(k)) + 1;
      rest /= space.levels(k);
    }
    allowed += space.is_forbidden(profile) ? 0 : 1;
  }
  if (allowed < j_count)
    throw Error(ErrorKind::kInfeasibleSpace,
                "forbidden combinations: only " + std::to_string(allowed) +
                    " profiles remain allowed, fewer than " + std::to_string(j_count));
}

Design random_design(const DesignSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  const int k_count = space.num_attributes();
  Design design(space.num_choice_sets(), space.profiles_per_set(), k_count);
  std::vector<int> attrs(k_count);
  std::vector<bool> constant(k_count);
  for (int s = 0; s < space.num_choice_sets(); ++s) {
    bool done = false;
    for (int attempt = 0; attempt < kRandomDesignResampleCap && !done; ++attempt) {
      // Partial Fisher-Yates draw of the F constant attributes.
      std::iota(attrs.begin(), attrs.end(), 0);
      std::fill(constant.begin(), constant.end(), false);
      for (int f = 0; f < space.num_constant_attributes(); ++f) {
        const int pick = rng.uniform_int(f, k_count - 1);
        std::swap(attrs[f], attrs[pick]);
        constant[attrs[f]] = true;
      }
      sample_set(space, constant, rng, design.set_levels(s));
      done = valid_choice_set(design.set_levels(s), space);
    }
    if (!done)
      throw Error(ErrorKind::kInfeasibleSpace,
                  "no valid choice set found for set " + std::to_string(s + 1) +
                      " within the resample cap (duplicate profiles or forbidden "
                      "combinations rule out the draws)");
  }
  return design;
}

Design random_conforming_design(const DesignSpace& space,
                                const MasterDesign& master, std::uint64_t seed) {
  if (master.num_sets() != space.num_choice_sets() ||
      master.num_attributes() != space.num_attributes())
    throw Error(ErrorKind::kInvalidInput, "master does not match design space");
  Rng rng(seed);
  const int k_count = space.num_attributes();
  Design design(space.num_choice_sets(), space.profiles_per_set(), k_count);
  for (int s = 0; s < space.num_choice_sets(); ++s) {
    std::vector<bool> constant(k_count);
    for (int k = 0; k < k_count; ++k) constant[k] = !master.varies(s, k);
    bool done = false;
    for (int attempt = 0; attempt < kRandomDesignResampleCap && !done; ++attempt) {
      sample_set(space, constant, rng, design.set_levels(s));
      done = valid_choice_set(design.set_levels(s), space);
    }
    if (!done)
      throw Error(ErrorKind::kInfeasibleSpace,
                  "no valid choice set conforming to the master for set " +
                      std::to_string(s + 1));
  }
  return design;
}

}  // namespace ppd
