#include "ppd/annealing.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "ppd/error.hpp"

namespace ppd {

namespace {

using Clock = std::chrono::steady_clock;

bool is_neg_inf(double v) { return std::isinf(v) && v < 0; }

// Redraws of the starting design while it scores -infinity.
constexpr int kStartRedraws = 100;

struct SetView {
  std::vector<int>& levels;
  int j_count;
  int k_count;

  int& at(int j, int k) { return levels[j * k_count + k]; }
  bool constant(int k) const {
    for (int j = 1; j < j_count; ++j)
      if (levels[j * k_count + k] != levels[k]) return false;
    return true;
  }
};

int other_level(int level, int num_levels, Rng& rng) {
  const int pick = rng.uniform_int(1, num_levels - 1);
  return pick >= level ? pick + 1 : pick;
}

int pick_attribute(const SetView& set, bool want_constant, int exclude, Rng& rng) {
  int count = 0;
  for (int k = 0; k < set.k_count; ++k)
    if (k != exclude && set.constant(k) == want_constant) ++count;
  if (count == 0) return -1;
  int n = rng.uniform_int(0, count - 1);
  for (int k = 0; k < set.k_count; ++k)
    if (k != exclude && set.constant(k) == want_constant && n-- == 0) return k;
  return -1;
}

// Fixes a random varying attribute at a random shared level, then moves
// attribute i at profile j off the shared level.
bool convert_and_vary(SetView& set, const DesignSpace& space, int i, int j, Rng& rng) {
  const int v = pick_attribute(set, false, i, rng);
  if (v < 0) return false;
  const int shared = rng.uniform_int(1, space.levels(v));
  for (int jj = 0; jj < set.j_count; ++jj) set.at(jj, v) = shared;
  set.at(j, i) = other_level(set.at(j, i), space.levels(i), rng);
  return true;
}

}  // namespace

const char* to_string(StoppingRule rule) {
  switch (rule) {
    case StoppingRule::kMaxRuntime: return "max_runtime";
    case StoppingRule::kMaxReheats: return "max_reheats";
    case StoppingRule::kNoImprovementOverReheatCycle: return "no_improvement_over_reheat_cycle";
  }
  return "no_improvement_over_reheat_cycle";
}

StoppingRule stopping_rule_from_string(const std::string& name) {
  if (name == "max_runtime") return StoppingRule::kMaxRuntime;
  if (name == "max_reheats") return StoppingRule::kMaxReheats;
  if (name == "no_improvement_over_reheat_cycle")
    return StoppingRule::kNoImprovementOverReheatCycle;
  throw Error(ErrorKind::kInvalidInput, "unknown stopping rule '" + name + "'");
}

void SaConfig::check() const {
  if (reheat_stall < 1) throw Error(ErrorKind::kInvalidInput, "reheat_stall must be >= 1");
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0))
    throw Error(ErrorKind::kInvalidInput, "gamma must lie in [0, 1]");
  if (random_walk_steps < 2)
    throw Error(ErrorKind::kInvalidInput, "random_walk_steps must be >= 2");
  if (stopping == StoppingRule::kMaxRuntime && !(max_runtime_seconds > 0.0))
    throw Error(ErrorKind::kInvalidInput, "max_runtime must be positive");
  if (stopping == StoppingRule::kMaxReheats && max_reheats < 1)
    throw Error(ErrorKind::kInvalidInput, "max_reheats must be >= 1");
  if (max_iterations < 0) throw Error(ErrorKind::kInvalidInput, "max_iterations must be >= 0");
  if (trace_stride < 1) throw Error(ErrorKind::kInvalidInput, "trace_stride must be >= 1");
}

double SaConfig::resolved_gamma(const DesignSpace& space) const {
  return gamma.value_or(static_cast<double>(space.num_constant_attributes()) /
                        space.num_attributes());
}

Move explore_move(const Design& current, const DesignSpace& space,
                  std::span<const AttributePair> interactions, double gamma, Rng& rng,
                  ExploreStats* stats) {
  const int j_count = space.profiles_per_set();
  const int k_count = space.num_attributes();
  Move move;
  for (int attempt = 0; attempt < kExploreRetryCap; ++attempt) {
    move.set = rng.uniform_int(0, space.num_choice_sets() - 1);
    const int j = rng.uniform_int(0, j_count - 1);
    const int i = rng.uniform_int(0, k_count - 1);
    const auto src = current.set_levels(move.set);
    move.levels.assign(src.begin(), src.end());
    SetView set{move.levels, j_count, k_count};

    ExploreStats local;
    bool made = false;
    if (set.constant(i)) {
      bool independent = true;
      for (const auto& [a, b] : interactions) {
        if ((a == i && !set.constant(b)) || (b == i && !set.constant(a))) independent = false;
      }
      if (independent) {
        ++local.constant_independent;
        made = convert_and_vary(set, space, i, j, rng);
      } else if (rng.uniform() <= gamma) {
        ++local.constant_randomized;
        const int shared = other_level(set.at(0, i), space.levels(i), rng);
        for (int jj = 0; jj < j_count; ++jj) set.at(jj, i) = shared;
        made = true;
      } else {
        ++local.constant_converted;
        made = convert_and_vary(set, space, i, j, rng);
      }
    } else {
      ++local.varying;
      set.at(j, i) = other_level(set.at(j, i), space.levels(i), rng);
      made = true;
      if (set.constant(i)) {
        ++local.varying_collapsed;
        const int c = pick_attribute(set, true, i, rng);
        if (c < 0) {
          made = false;
        } else {
          const int jj = rng.uniform_int(0, j_count - 1);
          set.at(jj, c) = other_level(set.at(jj, c), space.levels(c), rng);
        }
      }
    }
    if (made && valid_choice_set(move.levels, space)) {
      if (stats) {
        ++stats->moves;
        stats->constant_independent += local.constant_independent;
        stats->constant_randomized += local.constant_randomized;
        stats->constant_converted += local.constant_converted;
        stats->varying += local.varying;
        stats->varying_collapsed += local.varying_collapsed;
      }
      return move;
    }
    if (stats) ++stats->retries;
  }
  throw Error(ErrorKind::kStuckState, "no valid neighbour after " +
                                          std::to_string(kExploreRetryCap) + " attempts");
}

Design explore(const Design& current, const DesignSpace& space,
               std::span<const AttributePair> interactions, double gamma, std::uint64_t seed,
               ExploreStats* stats) {
  Rng rng(seed);
  const Move move = explore_move(current, space, interactions, gamma, rng, stats);
  Design out = current;
  std::copy(move.levels.begin(), move.levels.end(), out.set_levels(move.set).begin());
  return out;
}

bool metropolis_accept(double delta, double temperature, double u) {
  if (!(temperature > 0.0))
    throw Error(ErrorKind::kInvalidInput, "temperature must be positive");
  if (delta >= 0.0) return true;
  return u < std::exp(delta / temperature);
}

InitialTemperature initial_temperature(const Design& start, const DesignSpace& space,
                                       const Objective& objective, double gamma, int steps,
                                       std::uint64_t seed) {
  if (steps < 2) throw Error(ErrorKind::kInvalidInput, "random walk needs >= 2 steps");
  const std::vector<AttributePair> pairs = objective.interactions();
  IncrementalEvaluator eval(objective, start);
  Rng rng(seed);
  double sum = 0.0;
  int count = 0;
  for (int step = 0; step < steps; ++step) {
    const Move move = explore_move(eval.design(), space, pairs, gamma, rng);
    const double before = eval.value();
    const double after = eval.propose(move.set, move.levels);
    eval.commit();
    if (std::isfinite(before) && std::isfinite(after)) {
      sum += std::abs(after - before);
      ++count;
    }
  }
  InitialTemperature out;
  out.mean_abs_delta = count > 0 ? sum / count : 0.0;
  if (!(out.mean_abs_delta > 0.0)) {
    out.t0 = 1.0;
    out.fallback = true;
  } else {
    out.t0 = out.mean_abs_delta / -std::log(kTargetInitialAcceptance);
  }
  return out;
}

SaResult anneal(const DesignSpace& space, const Objective& objective, const SaConfig& config) {
  Design start = random_design(space, derive_seed(config.seed, 0));
  for (int redraw = 1; redraw <= kStartRedraws && is_neg_inf(objective.evaluate(start));
       ++redraw)
    start = random_design(space, derive_seed(config.seed, 100 + redraw));
  return anneal_from(start, space, objective, config);
}

SaResult anneal_from(const Design& start, const DesignSpace& space, const Objective& objective,
                     const SaConfig& config) {
  config.check();
  if (!validate_design(start, space).ok())
    throw Error(ErrorKind::kInvalidStart, "starting design violates the design space");
  const auto t_begin = Clock::now();
  const double gamma = config.resolved_gamma(space);
  const std::vector<AttributePair> pairs = objective.interactions();

  SaResult out;
  out.start = start;
  out.temperature = initial_temperature(start, space, objective, gamma,
                                        config.random_walk_steps, derive_seed(config.seed, 1));
  const double t0 = out.temperature.t0;

  IncrementalEvaluator eval(objective, start);
  Rng rng(derive_seed(config.seed, 2));
  double best = eval.value();
  out.design = start;
  std::int64_t k = 0;
  int stall = 0;
  bool improved_in_cycle = false;

  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - t_begin).count();
  };

  for (std::int64_t it = 1;; ++it) {
    const double temperature = t0 / static_cast<double>(k + 1);
    const Move move = explore_move(eval.design(), space, pairs, gamma, rng, &out.stats);
    const double current = eval.value();
    const double candidate = eval.propose(move.set, move.levels);
    const double u = rng.uniform();
    bool accept;
    if (is_neg_inf(candidate)) accept = is_neg_inf(current);
    else if (is_neg_inf(current)) accept = true;
    else accept = metropolis_accept(candidate - current, temperature, u);

    bool new_best = false;
    if (accept) {
      eval.commit();
      // A walk among singular designs still counts toward the stall.
      stall = is_neg_inf(candidate) ? stall + 1 : 0;
      if (!is_neg_inf(candidate) && (is_neg_inf(best) || candidate > best)) {
        best = candidate;
        out.design = eval.design();
        improved_in_cycle = true;
        new_best = true;
      }
    } else {
      ++stall;
    }
    ++k;

    bool reheated = false;
    bool stop = false;
    if (stall >= config.reheat_stall) {
      reheated = true;
      ++out.reheats;
      k = 0;
      stall = 0;
      if (config.stopping == StoppingRule::kNoImprovementOverReheatCycle && !improved_in_cycle)
        stop = true;
      if (config.stopping == StoppingRule::kMaxReheats && out.reheats >= config.max_reheats)
        stop = true;
      improved_in_cycle = false;
    }
    if (it % config.trace_stride == 0 || reheated || new_best)
      out.trace.push_back({it, temperature, eval.value(), best, accept, reheated});
    out.iterations = it;
    if (config.stopping == StoppingRule::kMaxRuntime &&
        elapsed() >= config.max_runtime_seconds)
      stop = true;
    if (config.max_iterations > 0 && it >= config.max_iterations) {
      out.hit_iteration_cap = !stop;
      stop = true;
    }
    if (stop) break;
  }
  out.stopped_by = config.stopping;
  out.value = objective.evaluate(out.design);
  out.elapsed_seconds = elapsed();
  return out;
}

void write_sa_trace_csv(std::ostream& out, const std::vector<SaTraceRow>& trace) {
  out << "iteration,temperature,current_db,best_db,accepted,reheated\n";
  out.precision(17);
  for (const auto& r : trace)
    out << r.iteration << ',' << r.temperature << ',' << r.current << ',' << r.best << ','
        << (r.accepted ? 1 : 0) << ',' << (r.reheated ? 1 : 0) << '\n';
}

}  // namespace ppd
