#include "ppd/master_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppd/error.hpp"
#include "ppd/linalg.hpp"
#include "ppd/model.hpp"
#include "ppd/rng.hpp"

namespace ppd {

MasterDesign::MasterDesign(int num_sets, int num_attributes)
    : num_sets_(num_sets),
      num_attributes_(num_attributes),
      cells_(static_cast<std::size_t>(num_sets) * num_attributes, 0) {}

MasterDesign::MasterDesign(const std::vector<std::vector<int>>& incidence)
    : MasterDesign(static_cast<int>(incidence.size()),
                   incidence.empty() ? 0 : static_cast<int>(incidence[0].size())) {
  for (int s = 0; s < num_sets_; ++s) {
    if (static_cast<int>(incidence[s].size()) != num_attributes_)
      throw Error(ErrorKind::kInvalidInput, "ragged incidence matrix");
    for (int k = 0; k < num_attributes_; ++k) {
      const int v = incidence[s][k];
      if (v != 0 && v != 1)
        throw Error(ErrorKind::kInvalidInput, "incidence entries must be 0 or 1");
      set_varies(s, k, v == 1);
    }
  }
}

MasterDesign MasterDesign::from_design(const Design& design) {
  MasterDesign master(design.num_sets(), design.num_attributes());
  for (int s = 0; s < design.num_sets(); ++s)
    for (int k = 0; k < design.num_attributes(); ++k)
      master.set_varies(s, k, !design.is_constant(s, k));
  return master;
}

int MasterDesign::row_sum(int set) const {
  int n = 0;
  for (int k = 0; k < num_attributes_; ++k) n += varies(set, k) ? 1 : 0;
  return n;
}

std::vector<int> MasterDesign::replications() const {
  std::vector<int> out(num_attributes_, 0);
  for (int s = 0; s < num_sets_; ++s)
    for (int k = 0; k < num_attributes_; ++k) out[k] += varies(s, k) ? 1 : 0;
  return out;
}

AnovaModel anova_model(const MasterDesign& master) {
  const int s_count = master.num_sets();
  const int t = master.num_attributes();
  int r = 0;
  for (int s = 0; s < s_count; ++s) r += master.row_sum(s);
  AnovaModel model{Eigen::MatrixXd::Zero(r, t),
                   Eigen::MatrixXd::Zero(r, std::max(s_count - 1, 0))};
  int row = 0;
  for (int s = 0; s < s_count; ++s)
    for (int k = 0; k < t; ++k) {
      if (!master.varies(s, k)) continue;
      model.treatments(row, k) = 1.0;
      if (s < s_count - 1) model.blocks(row, s) = 1.0;
      else model.blocks.row(row).setConstant(-1.0);
      ++row;
    }
  return model;
}

Eigen::MatrixXd anova_information(const MasterDesign& master) {
  const AnovaModel model = anova_model(master);
  Eigen::MatrixXd x(model.treatments.rows(),
                    model.treatments.cols() + model.blocks.cols());
  x << model.treatments, model.blocks;
  return x.transpose() * x;
}

Eigen::VectorXd treatment_variances(const MasterDesign& master) {
  const AnovaModel model = anova_model(master);
  const Eigen::MatrixXd& q = model.treatments;
  const Eigen::MatrixXd& z = model.blocks;
  Eigen::MatrixXd reduced = q.transpose() * q;
  if (z.cols() > 0) {
    for (int s = 0; s < master.num_sets(); ++s)
      if (master.row_sum(s) == 0)
        throw Error(ErrorKind::kSingularMaster, "a choice set has no varying attribute");
    const Eigen::MatrixXd qz = q.transpose() * z;
    const Eigen::LDLT<Eigen::MatrixXd> ztz(z.transpose() * z);
    reduced -= qz * ztz.solve(qz.transpose());
  }
  const int t = static_cast<int>(reduced.rows());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(reduced);
  lu.setThreshold(1e-10);
  if (lu.rank() < t)
    throw Error(ErrorKind::kSingularMaster,
                "treatment effects are not estimable from this master design");
  return lu.inverse().diagonal();
}

Eigen::VectorXd variance_balance_weights(const std::vector<int>& levels,
                                         VarianceBalance scheme) {
  const int t = static_cast<int>(levels.size());
  Eigen::VectorXd w(t);
  for (int d : levels)
    if (d < 2) throw Error(ErrorKind::kInvalidInput, "levels must be >= 2");
  if (scheme == VarianceBalance::kI) {
    double total = 0.0;
    for (int d : levels) total += d - 1;
    for (int i = 0; i < t; ++i) w(i) = (levels[i] - 1) / total;
  } else {
    for (int i = 0; i < t; ++i)
      w(i) = static_cast<double>((levels[i] - 1) * (levels[i] - 1)) / (2.0 * levels[i]);
  }
  return w;
}

double master_score(const MasterDesign& master, const MasterObjective& objective,
                    const std::vector<int>& levels) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (objective.kind == MasterObjective::Kind::kDOptimal)
    return log_det_psd(anova_information(master));
  try {
    const Eigen::VectorXd var = treatment_variances(master);
    return -variance_balance_weights(levels, objective.scheme).dot(var);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSingularMaster) return kNegInf;
    throw;
  }
}

namespace {

inline bool improves(double candidate, double current) {
  if (std::isinf(current) && current < 0) return std::isfinite(candidate);
  return candidate > current + 1e-12 * std::max(1.0, std::abs(current));
}

MasterDesign random_master(int s_count, int k_count, int strength, Rng& rng) {
  MasterDesign master(s_count, k_count);
  std::vector<int> attrs(k_count);
  for (int s = 0; s < s_count; ++s) {
    std::iota(attrs.begin(), attrs.end(), 0);
    for (int v = 0; v < strength; ++v) {
      const int pick = rng.uniform_int(v, k_count - 1);
      std::swap(attrs[v], attrs[pick]);
      master.set_varies(s, attrs[v], true);
    }
  }
  return master;
}

}  // namespace

MasterSearchResult optimize_master(const DesignSpace& space,
                                   const MasterObjective& objective,
                                   std::uint64_t seed, int restarts) {
  if (restarts < 1) throw Error(ErrorKind::kInvalidInput, "restarts must be >= 1");
  const int s_count = space.num_choice_sets();
  const int k_count = space.num_attributes();
  const auto& levels = space.attribute_levels();

  MasterSearchResult best;
  best.score = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (int restart = 0; restart < restarts; ++restart) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    MasterDesign master = random_master(s_count, k_count, space.profile_strength(), rng);
    double score = master_score(master, objective, levels);

    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < s_count; ++s)
        for (int v = 0; v < k_count; ++v) {
          if (!master.varies(s, v)) continue;
          for (int c = 0; c < k_count; ++c) {
            if (master.varies(s, c)) continue;
            master.set_varies(s, v, false);
            master.set_varies(s, c, true);
            const double candidate = master_score(master, objective, levels);
            if (improves(candidate, score)) {
              score = candidate;
              changed = true;
              break;  // v is now constant
            }
            master.set_varies(s, v, true);
            master.set_varies(s, c, false);
          }
        }
    }

    if (std::isfinite(score) && (!have_best || score > best.score)) {
      best = {master, score, restart};
      have_best = true;
    }
  }
  if (!have_best)
    throw Error(ErrorKind::kInfeasibleMaster, "every restart produced a singular master");
  return best;
}

}  // namespace ppd
