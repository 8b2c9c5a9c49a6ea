#include "ppd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ppd/criterion.hpp"
#include "ppd/error.hpp"
#include "ppd/parallel.hpp"
#include "ppd/rng.hpp"

namespace ppd {

namespace {

std::vector<std::vector<int>> effective_groups(const SimulationPlan& plan) {
  if (!plan.groups.empty()) return plan.groups;
  std::vector<int> all(plan.design.num_sets());
  for (int s = 0; s < plan.design.num_sets(); ++s) all[s] = s;
  return {all};
}

void code_rows(const Design& design, int s, const ModelSpec& model, std::vector<double>& out) {
  const int m = model.num_params();
  const int k_count = design.num_attributes();
  out.resize(static_cast<std::size_t>(design.profiles_per_set()) * m);
  for (int j = 0; j < design.profiles_per_set(); ++j)
    model.code_profile(design.profile(s, j).first(k_count),
                       {out.data() + static_cast<std::size_t>(j) * m,
                        static_cast<std::size_t>(m)});
}

}  // namespace

void SimulationPlan::check() const {
  if (respondents_per_group < 1)
    throw Error(ErrorKind::kInvalidInput, "respondents_per_group must be >= 1");
  if (num_replications < 1)
    throw Error(ErrorKind::kInvalidInput, "num_replications must be >= 1");
  if (true_beta.size() != true_model.num_params())
    throw Error(ErrorKind::kInvalidInput, "true_beta does not match the true model");
  if (true_model.num_attributes() != design.num_attributes())
    throw Error(ErrorKind::kInvalidInput, "true model and design disagree on attributes");
  std::vector<int> seen(design.num_sets(), 0);
  for (const auto& g : effective_groups(*this))
    for (int s : g) {
      if (s < 0 || s >= design.num_sets())
        throw Error(ErrorKind::kInvalidInput, "survey group names a missing choice set");
      ++seen[s];
    }
  for (int c : seen)
    if (c != 1)
      throw Error(ErrorKind::kInvalidInput, "survey groups must partition the choice sets");
}

std::vector<int> SimulationPlan::set_respondents() const {
  std::vector<int> out(design.num_sets(), 0);
  for (const auto& g : effective_groups(*this))
    for (int s : g) out[s] += respondents_per_group;
  return out;
}

ChoiceCounts simulate_choices(const SimulationPlan& plan, int replication) {
  const Design& d = plan.design;
  const int j_count = d.profiles_per_set();
  const int m = plan.true_model.num_params();
  ChoiceCounts out{d.num_sets(), j_count,
                   std::vector<int>(static_cast<std::size_t>(d.num_sets()) * j_count, 0)};
  // Cumulative choice probabilities per set.
  std::vector<std::vector<double>> cumulative(d.num_sets());
  std::vector<double> rows;
  std::vector<double> info(static_cast<std::size_t>(m) * m);
  std::vector<double> probs(j_count);
  for (int s = 0; s < d.num_sets(); ++s) {
    code_rows(d, s, plan.true_model, rows);
    detail::set_information(rows.data(), j_count, m, plan.true_beta.data(), info.data(),
                            probs.data());
    cumulative[s].resize(j_count);
    double acc = 0.0;
    for (int j = 0; j < j_count; ++j) cumulative[s][j] = acc += probs[j];
  }
  Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(replication)));
  for (const auto& group : effective_groups(plan))
    for (int r = 0; r < plan.respondents_per_group; ++r)
      for (int s : group) {
        const double u = rng.uniform() * cumulative[s].back();
        int j = 0;
        while (j < j_count - 1 && u >= cumulative[s][j]) ++j;
        ++out.counts[s * j_count + j];
      }
  return out;
}

double mnl_log_likelihood(const Design& design, const ModelSpec& model,
                          const ChoiceCounts& counts, const Eigen::VectorXd& beta,
                          Eigen::VectorXd* gradient, Eigen::MatrixXd* hessian) {
  const int m = model.num_params();
  const int j_count = design.profiles_per_set();
  if (beta.size() != m) throw Error(ErrorKind::kInvalidInput, "beta does not match model");
  if (counts.num_sets != design.num_sets() || counts.profiles_per_set != j_count)
    throw Error(ErrorKind::kInvalidInput, "counts do not match the design");
  std::vector<double> rows;
  std::vector<double> info(static_cast<std::size_t>(m) * m);
  std::vector<double> probs(j_count);
  if (gradient) gradient->setZero(m);
  if (hessian) hessian->setZero(m, m);
  double ll = 0.0;
  for (int s = 0; s < design.num_sets(); ++s) {
    int n = 0;
    for (int j = 0; j < j_count; ++j) n += counts.at(s, j);
    if (n == 0) continue;
    code_rows(design, s, model, rows);
    detail::set_information(rows.data(), j_count, m, beta.data(), info.data(), probs.data());
    for (int j = 0; j < j_count; ++j) {
      const int y = counts.at(s, j);
      if (y > 0) ll += y * std::log(probs[j]);
      if (gradient) {
        const double w = y - n * probs[j];
        for (int c = 0; c < m; ++c) (*gradient)(c) += w * rows[j * m + c];
      }
    }
    if (hessian)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) (*hessian)(a, b) -= n * info[a * m + b];
  }
  return ll;
}

EstimationResult fit_mnl(const Design& design, const ModelSpec& model,
                         const ChoiceCounts& counts) {
  for (int c : counts.counts)
    if (c < 0) throw Error(ErrorKind::kInvalidInput, "negative choice count");
  const int m = model.num_params();
  EstimationResult out;
  out.beta_hat = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  out.log_likelihood = mnl_log_likelihood(design, model, counts, out.beta_hat, &grad, &hess);
  for (int it = 0;; ++it) {
    out.iterations = it;
    out.gradient_norm = grad.cwiseAbs().maxCoeff();
    if (out.gradient_norm <= kGradientTolerance) {
      out.converged = true;
      break;
    }
    if (it >= kMaxNewtonIterations) break;
    Eigen::MatrixXd neg = -hess;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
    const double scale_d = std::max(1.0, neg.diagonal().maxCoeff());
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12 * scale_d) {
      neg.diagonal().array() += kHessianRidge;
      ldlt.compute(neg);
      out.ridge_added = true;
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) break;
    double scale = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      const Eigen::VectorXd trial = out.beta_hat + scale * step;
      Eigen::VectorXd g;
      Eigen::MatrixXd h;
      const double ll = mnl_log_likelihood(design, model, counts, trial, &g, &h);
      if (std::isfinite(ll) && ll >= out.log_likelihood) {
        out.beta_hat = trial;
        out.log_likelihood = ll;
        grad = std::move(g);
        hess = std::move(h);
        moved = true;
        break;
      }
    }
    if (!moved) {
      out.gradient_norm = grad.cwiseAbs().maxCoeff();
      break;
    }
  }
  if (out.converged) {
    const int j_count = design.profiles_per_set();
    std::vector<double> rows;
    std::vector<double> info(static_cast<std::size_t>(m) * m);
    std::vector<double> probs(j_count);
    for (int s = 0; s < design.num_sets() && !out.separated; ++s) {
      int n = 0;
      for (int j = 0; j < j_count; ++j) n += counts.at(s, j);
      if (n == 0) continue;
      code_rows(design, s, model, rows);
      detail::set_information(rows.data(), j_count, m, out.beta_hat.data(), info.data(),
                              probs.data());
      for (int j = 0; j < j_count; ++j)
        if (probs[j] < kSeparationProbability) out.separated = true;
    }
    if (out.separated) out.converged = false;
  }
  return out;
}

EmseResult emse(const Eigen::MatrixXd& beta_hats, const std::vector<bool>& converged,
                const Eigen::VectorXd& true_beta) {
  if (beta_hats.rows() < 1) throw Error(ErrorKind::kInvalidInput, "no replications");
  if (beta_hats.cols() != true_beta.size() ||
      static_cast<Eigen::Index>(converged.size()) != beta_hats.rows())
    throw Error(ErrorKind::kInvalidInput, "emse dimensions do not match");
  EmseResult out;
  double sum = 0.0;
  for (Eigen::Index r = 0; r < beta_hats.rows(); ++r) {
    if (!converged[r]) {
      ++out.excluded;
      continue;
    }
    sum += (beta_hats.row(r).transpose() - true_beta).squaredNorm();
    ++out.used;
  }
  out.emse = out.used > 0 ? sum / out.used : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Comparison compare_designs(const std::vector<DesignEntry>& designs, const SimulationPlan& plan,
                           const ModelSpec& fit_model, int threads) {
  const int m_fit = fit_model.num_params();
  if (fit_model.attribute_levels() != plan.true_model.attribute_levels())
    throw Error(ErrorKind::kInvalidInput, "the fitted model has different attributes");
  // True parameters land on the matching columns of the fitted model; the
  // rest are zero.
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(m_fit);
  const int m_main = plan.true_model.num_main_params();
  truth.head(m_main) = plan.true_beta.head(m_main);
  const auto& true_pairs = plan.true_model.interactions();
  const auto& fit_pairs = fit_model.interactions();
  for (std::size_t i = 0; i < true_pairs.size(); ++i) {
    const auto it = std::find(fit_pairs.begin(), fit_pairs.end(), true_pairs[i]);
    if (it == fit_pairs.end())
      throw Error(ErrorKind::kInvalidInput,
                  "the fitted model lacks interaction x" +
                      std::to_string(true_pairs[i].first + 1) + "*x" +
                      std::to_string(true_pairs[i].second + 1) + " of the true model");
    const int from = plan.true_model.interaction_offset(static_cast<int>(i));
    const int to = fit_model.interaction_offset(static_cast<int>(it - fit_pairs.begin()));
    const int width = (plan.true_model.attribute_levels()[true_pairs[i].first] - 1) *
                      (plan.true_model.attribute_levels()[true_pairs[i].second] - 1);
    truth.segment(to, width) = plan.true_beta.segment(from, width);
  }

  Comparison out;
  const int n = plan.num_replications;
  for (const auto& entry : designs) {
    SimulationPlan p = plan;
    p.design = entry.design;
    p.check();
    Eigen::MatrixXd hats(n, m_fit);
    std::vector<char> ok(n, 0);
    parallel_for(n, threads, [&](int r) {
      const EstimationResult fit = fit_mnl(p.design, fit_model, simulate_choices(p, r));
      hats.row(r) = fit.beta_hat.transpose();
      ok[r] = fit.converged ? 1 : 0;
    });
    std::vector<bool> converged(ok.begin(), ok.end());
    out.summary.push_back({entry.id, emse(hats, converged, truth)});
    for (int r = 0; r < n; ++r)
      out.replications.push_back({entry.id, r, (hats.row(r).transpose() - truth).squaredNorm(),
                                  converged[r]});
  }
  return out;
}

void write_replication_csv(std::ostream& out, const std::vector<ReplicationError>& rows) {
  out << "design_id,replication,sq_error,converged\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.design_id << ',' << r.replication << ',' << r.sq_error << ','
        << (r.converged ? 1 : 0) << '\n';
}

}  // namespace ppd
