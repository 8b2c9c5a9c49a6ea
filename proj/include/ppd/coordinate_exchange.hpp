#ifndef PPD_COORDINATE_EXCHANGE_HPP
#define PPD_COORDINATE_EXCHANGE_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ppd/criterion.hpp"
#include "ppd/master_design.hpp"
#include "ppd/model.hpp"

namespace ppd {

struct CeConfig {
  int num_starts = 30;
  int max_cycles = 0;  // 0: until a cycle makes no change
  std::uint64_t seed = 0;
  MasterObjective master_objective = MasterObjective::a_weighted(VarianceBalance::kII);
  int master_restarts = kDefaultMasterRestarts;
  // Starts run on this many workers. The recorded wall clock is that of the
  // configured mode.
  int threads = 1;

  void check() const;
};

struct CeTraceRow {
  int start = 0;
  int cycle = 0;  // 0 is the starting design
  double criterion = 0.0;
  double elapsed_ms = 0.0;
};

struct CeRun {
  Design design;
  double value = 0.0;
  int cycles = 0;
  int exchanges = 0;
  std::int64_t evaluations = 0;  // candidate criterion evaluations
  std::vector<CeTraceRow> trace;
};

// Coordinate exchange that keeps the constant-attribute pattern of `master`.
// Throws kInvalidStart unless `start` is valid and conforms to `master`.
CeRun restricted_coordinate_exchange(const Design& start, const MasterDesign& master,
                                     const DesignSpace& space, const Objective& objective,
                                     int max_cycles = 0, int start_index = 0);

struct CeStartResult {
  int start = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  int cycles = 0;
  double elapsed_ms = 0.0;
};

struct TwoStageResult {
  Design design;
  double value = 0.0;
  int best_start = 0;
  MasterDesign master;
  double master_score = 0.0;
  double elapsed_seconds = 0.0;
  std::int64_t evaluations = 0;  // over all starts
  std::vector<CeStartResult> starts;
  std::vector<CeTraceRow> trace;
};

TwoStageResult two_stage_ce(const DesignSpace& space, const Objective& objective,
                            const CeConfig& config);

void write_ce_trace_csv(std::ostream& out, const std::vector<CeTraceRow>& trace);

}  // namespace ppd

#endif  // PPD_COORDINATE_EXCHANGE_HPP
