#include "ppd/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppd/error.hpp"
#include "ppd/linalg.hpp"

namespace ppd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Resync the cached totals after this many commits to bound drift from the
// subtract-and-add updates.
constexpr int kResyncInterval = 256;

void code_set_rows(const ModelSpec& model, std::span<const int> set_levels,
                   int j_count, std::vector<double>& out) {
  const int m = model.num_params();
  const int k_count = model.num_attributes();
  out.resize(static_cast<std::size_t>(j_count) * m);
  for (int j = 0; j < j_count; ++j)
    model.code_profile(set_levels.subspan(static_cast<std::size_t>(j) * k_count, k_count),
                       {out.data() + static_cast<std::size_t>(j) * m,
                        static_cast<std::size_t>(m)});
}

double mean_or_neg_inf(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) {
    if (std::isinf(v) && v < 0) return kNegInf;
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

const char* to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::kMain: return "main";
    case ModelTag::kInteraction: return "interaction";
    case ModelTag::kRobust: return "robust";
  }
  return "main";
}

ModelTag model_tag_from_string(const std::string& name) {
  if (name == "main") return ModelTag::kMain;
  if (name == "interaction") return ModelTag::kInteraction;
  if (name == "robust") return ModelTag::kRobust;
  throw Error(ErrorKind::kInvalidInput, "unknown criterion tag '" + name + "'");
}

namespace detail {

void set_information(const double* x, int j_count, int m, const double* beta,
                     double* out, double* probs) {
  thread_local std::vector<int> varying;
  thread_local std::vector<double> centred;
  varying.clear();
  for (int c = 0; c < m; ++c)
    for (int j = 1; j < j_count; ++j)
      if (x[j * m + c] != x[c]) {
        varying.push_back(c);
        break;
      }
  const int v_count = static_cast<int>(varying.size());

  // Columns constant across the set shift every utility equally, so they are
  // left out of the utilities as well.
  double max_u = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < j_count; ++j) {
    double u = 0.0;
    for (int c : varying) u += x[j * m + c] * beta[c];
    probs[j] = u;
    max_u = std::max(max_u, u);
  }
  double total = 0.0;
  for (int j = 0; j < j_count; ++j) {
    probs[j] = std::exp(probs[j] - max_u);
    total += probs[j];
  }
  for (int j = 0; j < j_count; ++j) probs[j] /= total;

  std::fill(out, out + static_cast<std::size_t>(m) * m, 0.0);
  if (v_count == 0) return;

  centred.assign(static_cast<std::size_t>(j_count) * v_count, 0.0);
  for (int a = 0; a < v_count; ++a) {
    const int c = varying[a];
    double mean = 0.0;
    for (int j = 0; j < j_count; ++j) mean += probs[j] * x[j * m + c];
    for (int j = 0; j < j_count; ++j) centred[j * v_count + a] = x[j * m + c] - mean;
  }
  for (int j = 0; j < j_count; ++j) {
    const double pj = probs[j];
    const double* d = centred.data() + static_cast<std::size_t>(j) * v_count;
    for (int a = 0; a < v_count; ++a) {
      const double wa = pj * d[a];
      double* row = out + static_cast<std::size_t>(varying[a]) * m;
      for (int b = 0; b <= a; ++b) row[varying[b]] += wa * d[b];
    }
  }
  for (int a = 0; a < v_count; ++a)
    for (int b = 0; b < a; ++b)
      out[static_cast<std::size_t>(varying[b]) * m + varying[a]] =
          out[static_cast<std::size_t>(varying[a]) * m + varying[b]];
}

}  // namespace detail

Eigen::VectorXd mnl_probabilities(const Eigen::MatrixXd& coded_set,
                                  const Eigen::VectorXd& beta) {
  if (coded_set.cols() != beta.size())
    throw Error(ErrorKind::kInvalidInput, "beta dimension does not match coded set");
  Eigen::VectorXd u = coded_set * beta;
  u.array() -= u.maxCoeff();
  Eigen::VectorXd p = u.array().exp();
  return p / p.sum();
}

Eigen::MatrixXd information_matrix(const Design& design, const ModelSpec& model,
                                   const Eigen::VectorXd& beta) {
  const int m = model.num_params();
  if (beta.size() != m)
    throw Error(ErrorKind::kInvalidInput, "beta dimension does not match model");
  const int j_count = design.profiles_per_set();
  std::vector<double> rows;
  std::vector<double> summand(static_cast<std::size_t>(m) * m);
  std::vector<double> probs(j_count);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
  for (int s = 0; s < design.num_sets(); ++s) {
    code_set_rows(model, design.set_levels(s), j_count, rows);
    detail::set_information(rows.data(), j_count, m, beta.data(), summand.data(),
                            probs.data());
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) total(i, k) += summand[i * m + k];
  }
  return total;
}

double d_criterion(const Design& design, const ModelSpec& model,
                   const Eigen::VectorXd& beta) {
  return log_det_psd(information_matrix(design, model, beta));
}

CriterionValue db_criterion(const Design& design, const ModelSpec& model,
                            const PriorDraws& draws) {
  if (draws.num_draws() < 1) throw Error(ErrorKind::kInvalidInput, "no prior draws");
  if (draws.dim() != model.num_params())
    throw Error(ErrorKind::kInvalidInput, "draw dimension does not match model");
  std::vector<double> values(draws.num_draws());
  for (int r = 0; r < draws.num_draws(); ++r)
    values[r] = d_criterion(design, model, draws.draws.row(r).transpose());
  return {mean_or_neg_inf(values), draws.num_draws(),
          model.interactions().empty() ? ModelTag::kMain : ModelTag::kInteraction};
}

EfficiencyResult efficiency_from_values(double db_x, double db_ref, int num_params) {
  EfficiencyResult out;
  out.db_x = db_x;
  out.db_ref = db_ref;
  out.num_params = num_params;
  const bool x_bad = std::isinf(db_x) && db_x < 0;
  const bool ref_bad = std::isinf(db_ref) && db_ref < 0;
  if (x_bad || ref_bad) {
    out.degenerate = true;
    if (x_bad && ref_bad) out.efficiency = std::numeric_limits<double>::quiet_NaN();
    else out.efficiency = x_bad ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  out.efficiency = std::exp((db_x - db_ref) / num_params);
  return out;
}

EfficiencyResult relative_db_efficiency(const Design& design_x, const Design& design_ref,
                                        const ModelSpec& model, const PriorDraws& draws) {
  const double x = db_criterion(design_x, model, draws).value;
  const double ref = db_criterion(design_ref, model, draws).value;
  return efficiency_from_values(x, ref, model.num_params());
}

void RobustCriterionSpec::check() const {
  if (main_model.attribute_levels() != interaction_model.attribute_levels())
    throw Error(ErrorKind::kInvalidInput,
                "robust criterion models disagree on attribute levels");
  const auto& mi = main_model.interactions();
  const auto& ii = interaction_model.interactions();
  if (mi.size() > ii.size() || !std::equal(mi.begin(), mi.end(), ii.begin()))
    throw Error(ErrorKind::kInvalidInput,
                "main model parameters must be a prefix of the interaction model's");
  if (main_prior.dim() != main_model.num_params() ||
      interaction_prior.dim() != interaction_model.num_params())
    throw Error(ErrorKind::kInvalidInput, "prior dimension does not match its model");
  if (!(main_weight > 0.0) || !(interaction_weight > 0.0))
    throw Error(ErrorKind::kInvalidInput, "robust weights must be positive");
}

CriterionValue robust_criterion(const Design& design, const RobustCriterionSpec& spec,
                                const PriorDraws& draws_main, const PriorDraws& draws_int) {
  spec.check();
  const CriterionValue main = db_criterion(design, spec.main_model, draws_main);
  const CriterionValue inter = db_criterion(design, spec.interaction_model, draws_int);
  CriterionValue out;
  out.tag = ModelTag::kRobust;
  out.num_draws = draws_main.num_draws();
  if ((std::isinf(main.value) && main.value < 0) ||
      (std::isinf(inter.value) && inter.value < 0)) {
    out.value = kNegInf;
    return out;
  }
  out.value = spec.main_weight * main.value / spec.main_model.num_params() +
              spec.interaction_weight * inter.value / spec.interaction_model.num_params();
  return out;
}

Objective::Objective(std::vector<ObjectiveTerm> terms, ModelTag tag)
    : terms_(std::move(terms)), tag_(tag) {
  if (terms_.empty()) throw Error(ErrorKind::kInvalidInput, "objective has no terms");
  for (const auto& t : terms_) {
    if (t.draws.rows() < 1) throw Error(ErrorKind::kInvalidInput, "no prior draws");
    if (t.draws.cols() != t.model.num_params())
      throw Error(ErrorKind::kInvalidInput, "draw dimension does not match model");
    if (!(t.weight > 0.0))
      throw Error(ErrorKind::kInvalidInput, "objective weights must be positive");
    if (t.model.attribute_levels() != terms_.front().model.attribute_levels())
      throw Error(ErrorKind::kInvalidInput, "objective terms disagree on attributes");
  }
}

Objective Objective::bayesian(const ModelSpec& model, const PriorDraws& draws) {
  return Objective({{model, draws.draws, 1.0}},
                   model.interactions().empty() ? ModelTag::kMain : ModelTag::kInteraction);
}

Objective Objective::robust(const RobustCriterionSpec& spec, const PriorDraws& draws_main,
                            const PriorDraws& draws_int) {
  spec.check();
  return Objective(
      {{spec.main_model, draws_main.draws,
        spec.main_weight / spec.main_model.num_params()},
       {spec.interaction_model, draws_int.draws,
        spec.interaction_weight / spec.interaction_model.num_params()}},
      ModelTag::kRobust);
}

int Objective::num_attributes() const { return terms_.front().model.num_attributes(); }

std::vector<AttributePair> Objective::interactions() const {
  std::vector<AttributePair> out;
  for (const auto& t : terms_)
    for (const auto& p : t.model.interactions()) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const AttributePair& q) {
        return (q.first == p.first && q.second == p.second) ||
               (q.first == p.second && q.second == p.first);
      });
      if (!seen) out.push_back(p);
    }
  return out;
}

bool Objective::independent_of_constant(int attribute,
                                        std::span<const bool> constant_in_set) const {
  for (const auto& t : terms_)
    for (const auto& [a, b] : t.model.interactions()) {
      if (a == attribute && !constant_in_set[b]) return false;
      if (b == attribute && !constant_in_set[a]) return false;
    }
  return true;
}

double Objective::evaluate(const Design& design) const {
  double value = 0.0;
  for (const auto& t : terms_) {
    const int m = t.model.num_params();
    const int r_count = static_cast<int>(t.draws.rows());
    const int j_count = design.profiles_per_set();
    std::vector<std::vector<double>> rows(design.num_sets());
    for (int s = 0; s < design.num_sets(); ++s)
      code_set_rows(t.model, design.set_levels(s), j_count, rows[s]);
    std::vector<double> summand(static_cast<std::size_t>(m) * m);
    std::vector<double> total(static_cast<std::size_t>(m) * m);
    std::vector<double> probs(j_count);
    std::vector<double> log_dets(r_count);
    Eigen::VectorXd beta(m);
    for (int r = 0; r < r_count; ++r) {
      beta = t.draws.row(r).transpose();
      std::fill(total.begin(), total.end(), 0.0);
      for (int s = 0; s < design.num_sets(); ++s) {
        detail::set_information(rows[s].data(), j_count, m, beta.data(), summand.data(),
                                probs.data());
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += summand[i];
      }
      log_dets[r] = log_det_pivoted_inplace(total.data(), m);
    }
    const double term = mean_or_neg_inf(log_dets);
    if (std::isinf(term) && term < 0) return kNegInf;
    value += t.weight * term;
  }
  return value;
}

IncrementalEvaluator::IncrementalEvaluator(const Objective& objective, const Design& design)
    : objective_(&objective) {
  reset(design);
}

void IncrementalEvaluator::reset(const Design& design) {
  design_ = design;
  num_sets_ = design.num_sets();
  const int j_count = design.profiles_per_set();
  const auto& terms = objective_->terms();
  caches_.assign(terms.size(), TermCache{});
  probs_.resize(j_count);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    TermCache& cache = caches_[t];
    const int m = terms[t].model.num_params();
    const int r_count = static_cast<int>(terms[t].draws.rows());
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    cache.m = m;
    cache.summands.assign(static_cast<std::size_t>(r_count) * num_sets_ * mm, 0.0);
    cache.totals.assign(static_cast<std::size_t>(r_count) * mm, 0.0);
    cache.log_dets.assign(r_count, 0.0);
    cache.proposed.assign(static_cast<std::size_t>(r_count) * mm, 0.0);
    cache.proposed_log_dets.assign(r_count, 0.0);
    Eigen::RowVectorXd beta(m);
    for (int s = 0; s < num_sets_; ++s) {
      code_set_rows(terms[t].model, design.set_levels(s), j_count, coded_);
      for (int r = 0; r < r_count; ++r) {
        beta = terms[t].draws.row(r);
        detail::set_information(coded_.data(), j_count, m, beta.data(),
                                summand(cache, r, s), probs_.data());
      }
    }
    recompute_totals(t);
  }
  value_ = combine(false);
  proposed_set_ = -1;
  commits_since_resync_ = 0;
}

void IncrementalEvaluator::recompute_totals(std::size_t t) {
  TermCache& cache = caches_[t];
  const std::size_t mm = static_cast<std::size_t>(cache.m) * cache.m;
  const int r_count = static_cast<int>(cache.log_dets.size());
  scratch_.resize(mm);
  for (int r = 0; r < r_count; ++r) {
    double* total = cache.totals.data() + r * mm;
    std::fill(total, total + mm, 0.0);
    for (int s = 0; s < num_sets_; ++s) {
      const double* src = summand(cache, r, s);
      for (std::size_t i = 0; i < mm; ++i) total[i] += src[i];
    }
    std::copy(total, total + mm, scratch_.begin());
    cache.log_dets[r] = log_det_pivoted_inplace(scratch_.data(), cache.m);
  }
  cache.value = mean_or_neg_inf(cache.log_dets);
}

double IncrementalEvaluator::combine(bool proposed) const {
  double value = 0.0;
  const auto& terms = objective_->terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double v = proposed ? caches_[t].proposed_value : caches_[t].value;
    if (std::isinf(v) && v < 0) return kNegInf;
    value += terms[t].weight * v;
  }
  return value;
}

double IncrementalEvaluator::propose(int set, std::span<const int> set_levels) {
  if (set < 0 || set >= num_sets_ || set_levels.size() != design_.set_size())
    throw Error(ErrorKind::kInvalidInput, "proposal does not match the design");
  const int j_count = design_.profiles_per_set();
  const auto& terms = objective_->terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    TermCache& cache = caches_[t];
    const int m = cache.m;
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    const int r_count = static_cast<int>(cache.log_dets.size());
    code_set_rows(terms[t].model, set_levels, j_count, coded_);
    scratch_.resize(mm);
    Eigen::RowVectorXd beta(m);
    for (int r = 0; r < r_count; ++r) {
      beta = terms[t].draws.row(r);
      double* fresh = cache.proposed.data() + r * mm;
      detail::set_information(coded_.data(), j_count, m, beta.data(), fresh, probs_.data());
      const double* old = summand(cache, r, set);
      const double* total = cache.totals.data() + r * mm;
      for (std::size_t i = 0; i < mm; ++i) scratch_[i] = total[i] - old[i] + fresh[i];
      cache.proposed_log_dets[r] = log_det_pivoted_inplace(scratch_.data(), m);
    }
    cache.proposed_value = mean_or_neg_inf(cache.proposed_log_dets);
  }
  proposed_set_ = set;
  proposed_levels_.assign(set_levels.begin(), set_levels.end());
  proposed_value_ = combine(true);
  return proposed_value_;
}

void IncrementalEvaluator::commit() {
  if (proposed_set_ < 0) throw Error(ErrorKind::kInvalidInput, "nothing to commit");
  const int set = proposed_set_;
  for (auto& cache : caches_) {
    const std::size_t mm = static_cast<std::size_t>(cache.m) * cache.m;
    const int r_count = static_cast<int>(cache.log_dets.size());
    for (int r = 0; r < r_count; ++r) {
      double* old = summand(cache, r, set);
      const double* fresh = cache.proposed.data() + r * mm;
      double* total = cache.totals.data() + r * mm;
      for (std::size_t i = 0; i < mm; ++i) {
        total[i] += fresh[i] - old[i];
        old[i] = fresh[i];
      }
    }
    cache.log_dets = cache.proposed_log_dets;
    cache.value = cache.proposed_value;
  }
  std::copy(proposed_levels_.begin(), proposed_levels_.end(),
            design_.set_levels(set).begin());
  value_ = proposed_value_;
  proposed_set_ = -1;
  if (++commits_since_resync_ >= kResyncInterval) resync();
}

void IncrementalEvaluator::resync() {
  for (std::size_t t = 0; t < caches_.size(); ++t) recompute_totals(t);
  value_ = combine(false);
  commits_since_resync_ = 0;
}

}  // namespace ppd
