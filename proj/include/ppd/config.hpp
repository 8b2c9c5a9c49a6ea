#ifndef PPD_CONFIG_HPP
#define PPD_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppd/annealing.hpp"
#include "ppd/benchmark.hpp"
#include "ppd/coordinate_exchange.hpp"
#include "ppd/criterion.hpp"
#include "ppd/model.hpp"
#include "ppd/prior.hpp"

namespace ppd {

// Command-line values that win over the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<int> threads;
};

struct DesignRef {
  std::string id;
  std::filesystem::path path;  // "builtin:case_study_original" is the shipped design
};

struct SimulationSettings {
  int respondents_per_group = 100;
  int replications = 500;
  ModelSpec true_model;
  Eigen::VectorXd true_beta;
  bool fit_true_model = true;  // else the interaction (design-stage) model
};

struct BenchmarkSettings {
  std::vector<RaceScenario> scenarios;
  int replicates = 1;
  RaceConfig race;
};

// Everything one run needs, plus the resolved document it was built from.
struct ScenarioConfig {
  nlohmann::json resolved;
  std::filesystem::path base_dir;  // relative design paths start here

  int num_sets = 0;
  int profiles_per_set = 0;
  std::vector<int> levels;
  int num_constant = 0;
  std::vector<ForbiddenCombination> forbidden;

  ModelTag criterion = ModelTag::kMain;
  ModelSpec main_model;
  ModelSpec interaction_model;  // equals main_model without interactions
  PriorSpec prior;              // over interaction_model
  double main_weight = 1.0;
  double interaction_weight = 1.0;
  int draws = kDefaultNumDraws;
  SamplingMethod sampling = SamplingMethod::kQuasiMonteCarlo;

  std::string optimizer = "sa";
  SaConfig sa;
  CeConfig ce;

  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::vector<int>> survey_groups;  // 0-based sets

  std::vector<DesignRef> designs;
  std::string reference;

  SimulationSettings simulation;
  BenchmarkSettings benchmark;

  DesignSpace space() const;
  // Model the criterion tag optimizes (the interaction model for robust).
  const ModelSpec& criterion_model() const;
  PriorSpec main_prior() const;
};

// Library defaults as a config document.
nlohmann::json default_config();
// Named starting points merged under the user's document.
nlohmann::json preset_config(const std::string& name);

// Parses text, merges default <- preset <- text <- overrides and validates.
// Errors are kConfig with "<source>:<line>: <key path>: <message>".
ScenarioConfig parse_config(const std::string& text, const std::string& source_name,
                            const ConfigOverrides& overrides = {});
ScenarioConfig load_config(const std::filesystem::path& path,
                           const ConfigOverrides& overrides = {});

// 1-based line of the value at `path` (keys, or array indices as digits) in
// `text`; the deepest prefix found wins, 0 when none is.
int locate_line(const std::string& text, const std::vector<std::string>& path);

}  // namespace ppd

#endif  // PPD_CONFIG_HPP
