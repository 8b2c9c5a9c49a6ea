#ifndef PPD_ANNEALING_HPP
#define PPD_ANNEALING_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppd/criterion.hpp"
#include "ppd/model.hpp"
#include "ppd/rng.hpp"

namespace ppd {

enum class StoppingRule { kMaxRuntime, kMaxReheats, kNoImprovementOverReheatCycle };

const char* to_string(StoppingRule rule);
StoppingRule stopping_rule_from_string(const std::string& name);

inline constexpr int kExploreRetryCap = 10000;

struct SaConfig {
  int reheat_stall = 1000;
  StoppingRule stopping = StoppingRule::kNoImprovementOverReheatCycle;
  double max_runtime_seconds = 60.0;
  int max_reheats = 20;
  // Defaults to F/K of the space.
  std::optional<double> gamma;
  int random_walk_steps = 100;
  // Hard cap on iterations under any rule; 0 disables it.
  std::int64_t max_iterations = 0;
  // Every trace_stride-th iteration is traced, plus reheats and new bests.
  int trace_stride = 1;
  std::uint64_t seed = 0;

  void check() const;
  double resolved_gamma(const DesignSpace& space) const;
};

// Hits of each branch of the exploration rule.
struct ExploreStats {
  std::int64_t moves = 0;
  std::int64_t constant_independent = 0;  // constant pick, criterion blind to its level
  std::int64_t constant_randomized = 0;   // constant pick, shared level redrawn
  std::int64_t constant_converted = 0;    // constant pick, convert-and-vary
  std::int64_t varying = 0;
  std::int64_t varying_collapsed = 0;  // varying pick became constant
  std::int64_t retries = 0;
};

// One proposed neighbour: choice set `set` replaced by `levels`.
struct Move {
  int set = 0;
  std::vector<int> levels;
};

// A random neighbour of `current` that keeps every design invariant. The
// criterion is blind to a constant attribute's level when none of
// `interactions` pairs it with an attribute that varies in the set.
Move explore_move(const Design& current, const DesignSpace& space,
                  std::span<const AttributePair> interactions, double gamma, Rng& rng,
                  ExploreStats* stats = nullptr);

Design explore(const Design& current, const DesignSpace& space,
               std::span<const AttributePair> interactions, double gamma, std::uint64_t seed,
               ExploreStats* stats = nullptr);

bool metropolis_accept(double delta, double temperature, double u);

struct InitialTemperature {
  double t0 = 1.0;
  double mean_abs_delta = 0.0;
  bool fallback = false;  // every step left the criterion unchanged
};

inline constexpr double kTargetInitialAcceptance = 0.8;

// T0 = mean|delta| / -ln(0.8) over a walk of `steps` unconditionally accepted
// moves from `start`.
InitialTemperature initial_temperature(const Design& start, const DesignSpace& space,
                                       const Objective& objective, double gamma, int steps,
                                       std::uint64_t seed);

struct SaTraceRow {
  std::int64_t iteration = 0;
  double temperature = 0.0;
  double current = 0.0;
  double best = 0.0;
  bool accepted = false;
  bool reheated = false;
};

struct SaResult {
  Design design;
  double value = 0.0;
  Design start;
  InitialTemperature temperature;
  std::int64_t iterations = 0;
  int reheats = 0;
  double elapsed_seconds = 0.0;
  StoppingRule stopped_by = StoppingRule::kNoImprovementOverReheatCycle;
  bool hit_iteration_cap = false;
  ExploreStats stats;
  std::vector<SaTraceRow> trace;
};

SaResult anneal(const DesignSpace& space, const Objective& objective, const SaConfig& config);

// Same, from a given valid start.
SaResult anneal_from(const Design& start, const DesignSpace& space, const Objective& objective,
                     const SaConfig& config);

void write_sa_trace_csv(std::ostream& out, const std::vector<SaTraceRow>& trace);

}  // namespace ppd

#endif  // PPD_ANNEALING_HPP
