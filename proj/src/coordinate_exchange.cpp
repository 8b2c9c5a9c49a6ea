#include "ppd/coordinate_exchange.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "ppd/error.hpp"
#include "ppd/parallel.hpp"
#include "ppd/rng.hpp"

namespace ppd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool improves(double candidate, double current) {
  if (std::isinf(candidate) && candidate < 0) return false;
  if (std::isinf(current) && current < 0) return true;
  return candidate > current + 1e-12 * std::max(1.0, std::abs(current));
}

}  // namespace

void CeConfig::check() const {
  if (num_starts < 1) throw Error(ErrorKind::kInvalidInput, "num_starts must be >= 1");
  if (max_cycles < 0) throw Error(ErrorKind::kInvalidInput, "max_cycles must be >= 0");
  if (master_restarts < 1)
    throw Error(ErrorKind::kInvalidInput, "master_restarts must be >= 1");
}

CeRun restricted_coordinate_exchange(const Design& start, const MasterDesign& master,
                                     const DesignSpace& space, const Objective& objective,
                                     int max_cycles, int start_index) {
  if (!validate_design(start, space).ok())
    throw Error(ErrorKind::kInvalidStart, "starting design violates the design space");
  if (!(MasterDesign::from_design(start) == master))
    throw Error(ErrorKind::kInvalidStart, "starting design does not follow the master");

  const auto t0 = Clock::now();
  const int j_count = space.profiles_per_set();
  const int k_count = space.num_attributes();
  IncrementalEvaluator eval(objective, start);
  CeRun run;
  run.trace.push_back({start_index, 0, eval.value(), ms_since(t0)});
  std::vector<int> candidate(eval.design().set_size());

  // Tries every alternative produced by `apply` and installs the best strict
  // improvement.
  auto exchange = [&](int s, int num_levels, auto&& apply) {
    const auto current = eval.design().set_levels(s);
    int best_level = 0;
    double best_value = eval.value();
    for (int level = 1; level <= num_levels; ++level) {
      std::copy(current.begin(), current.end(), candidate.begin());
      if (!apply(level)) continue;
      if (!valid_choice_set(candidate, space)) continue;
      const double v = eval.propose(s, candidate);
      ++run.evaluations;
      if (improves(v, best_value)) {
        best_value = v;
        best_level = level;
      }
    }
    if (best_level == 0) return false;
    std::copy(current.begin(), current.end(), candidate.begin());
    apply(best_level);
    eval.propose(s, candidate);
    eval.commit();
    return true;
  };

  for (int cycle = 1; max_cycles == 0 || cycle <= max_cycles; ++cycle) {
    int changes = 0;
    for (int s = 0; s < space.num_choice_sets(); ++s)
      for (int j = 0; j < j_count; ++j)
        for (int k = 0; k < k_count; ++k) {
          const int d = space.levels(k);
          if (master.varies(s, k)) {
            const int cell = j * k_count + k;
            changes += exchange(s, d, [&](int level) {
              if (candidate[cell] == level) return false;
              candidate[cell] = level;
              return true;
            });
          } else if (j == 0) {
            changes += exchange(s, d, [&](int level) {
              if (candidate[k] == level) return false;
              for (int jj = 0; jj < j_count; ++jj) candidate[jj * k_count + k] = level;
              return true;
            });
          }
        }
    run.cycles = cycle;
    run.exchanges += changes;
    run.trace.push_back({start_index, cycle, eval.value(), ms_since(t0)});
    if (changes == 0) break;
  }
  eval.resync();
  run.design = eval.design();
  run.value = objective.evaluate(run.design);
  return run;
}

TwoStageResult two_stage_ce(const DesignSpace& space, const Objective& objective,
                            const CeConfig& config) {
  config.check();
  const auto t0 = Clock::now();
  TwoStageResult out;
  const MasterSearchResult stage_one = optimize_master(
      space, config.master_objective, derive_seed(config.seed, 0), config.master_restarts);
  out.master = stage_one.master;
  out.master_score = stage_one.score;

  std::vector<CeRun> runs(config.num_starts);
  std::vector<CeStartResult> starts(config.num_starts);
  parallel_for(config.num_starts, config.threads, [&](int i) {
    const auto ts = Clock::now();
    const std::uint64_t seed = derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(i));
    const Design start = random_conforming_design(space, out.master, seed);
    runs[i] = restricted_coordinate_exchange(start, out.master, space, objective,
                                             config.max_cycles, i);
    starts[i] = {i, seed, runs[i].value, runs[i].cycles, ms_since(ts)};
  });

  out.best_start = 0;
  for (int i = 1; i < config.num_starts; ++i)
    if (improves(runs[i].value, runs[out.best_start].value)) out.best_start = i;
  out.design = runs[out.best_start].design;
  out.value = runs[out.best_start].value;
  out.starts = std::move(starts);
  for (auto& r : runs) {
    out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
    out.evaluations += r.evaluations;
  }
  out.elapsed_seconds = ms_since(t0) / 1000.0;
  return out;
}

void write_ce_trace_csv(std::ostream& out, const std::vector<CeTraceRow>& trace) {
  out << "start,cycle,criterion,elapsed_ms\n";
  out.precision(17);
  for (const auto& r : trace)
    out << r.start << ',' << r.cycle << ',' << r.criterion << ',' << r.elapsed_ms << '\n';
}

}  // namespace ppd
