#include "ppd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ppd/annealing.hpp"
#include "ppd/benchmark.hpp"
#include "ppd/coordinate_exchange.hpp"
#include "ppd/design_io.hpp"
#include "ppd/parallel.hpp"
#include "ppd/rng.hpp"
#include "ppd/scenarios.hpp"

namespace ppd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDrawStream = 10;
constexpr std::uint64_t kSimulationStream = 20;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kConfig, "cannot create output directory " + dir.string());
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json explore_stats_json(const ExploreStats& s) {
  return {{"moves", s.moves},
          {"constant_independent", s.constant_independent},
          {"constant_randomized", s.constant_randomized},
          {"constant_converted", s.constant_converted},
          {"varying", s.varying},
          {"varying_collapsed", s.varying_collapsed},
          {"retries", s.retries}};
}

// D_B of `design` under each model the criterion involves.
json criterion_values(const ScenarioConfig& config, const CommonDraws& draws,
                      const Design& design) {
  json out = json::object();
  if (config.criterion != ModelTag::kInteraction)
    out["main"] = number_json(db_criterion(design, config.main_model, draws.main).value);
  if (config.criterion != ModelTag::kMain)
    out["interaction"] =
        number_json(db_criterion(design, config.interaction_model, draws.interaction).value);
  return out;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidInput:
    case ErrorKind::kInvalidPrior:
    case ErrorKind::kExplicitPriorRequired:
      return kExitConfig;
    case ErrorKind::kInfeasibleSpace:
    case ErrorKind::kInfeasibleMaster:
    case ErrorKind::kInvalidStart:
    case ErrorKind::kStuckState:
      return kExitInfeasible;
    case ErrorKind::kSingularMaster:
    case ErrorKind::kNumerical:
      return kExitNumerical;
  }
  return kExitNumerical;
}

CommonDraws common_draws(const ScenarioConfig& config) {
  CommonDraws out;
  out.interaction = sample_prior(config.prior, config.draws,
                                 derive_seed(config.seed, kDrawStream), config.sampling);
  out.main = out.interaction;
  out.main.draws = out.interaction.draws.leftCols(config.main_model.num_params());
  return out;
}

Objective build_objective(const ScenarioConfig& config, const CommonDraws& draws) {
  switch (config.criterion) {
    case ModelTag::kMain: return Objective::bayesian(config.main_model, draws.main);
    case ModelTag::kInteraction:
      return Objective::bayesian(config.interaction_model, draws.interaction);
    case ModelTag::kRobust: {
      RobustCriterionSpec spec{config.main_model,        config.main_prior(),
                               config.interaction_model, config.prior,
                               config.main_weight,       config.interaction_weight};
      return Objective::robust(spec, draws.main, draws.interaction);
    }
  }
  throw Error(ErrorKind::kInvalidInput, "unknown criterion");
}

std::vector<DesignEntry> load_designs(const ScenarioConfig& config) {
  const DesignSpace space = config.space();
  std::vector<DesignEntry> out;
  for (const auto& ref : config.designs) {
    Design d;
    try {
      if (ref.path.string() == "builtin:case_study_original") {
        d = case_study_original_design();
      } else {
        const fs::path p = ref.path.is_absolute() ? ref.path : config.base_dir / ref.path;
        d = load_design(p);
      }
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, "design '" + ref.id + "': " + e.what());
    }
    const ValidationReport report = validate_design(d, space);
    if (!report.ok()) {
      const Violation& v = report.violations.front();
      std::ostringstream msg;
      msg << "design '" << ref.id << "' is not valid in the configured space: "
          << to_string(v.kind);
      if (v.set >= 0) msg << " in set " << v.set + 1;
      if (!v.detail.empty()) msg << " (" << v.detail << ")";
      throw Error(ErrorKind::kConfig, msg.str());
    }
    out.push_back({ref.id, d});
  }
  return out;
}

void run_generate(const ScenarioConfig& config, const fs::path& out) {
  const DesignSpace space = config.space();
  check_feasible(space);
  ensure_dir(out);
  const CommonDraws draws = common_draws(config);
  const Objective objective = build_objective(config, draws);

  json report;
  report["command"] = "generate";
  report["config"] = config.resolved;
  report["draw_seed"] = draws.interaction.seed;
  Design design;
  double value = 0.0;

  if (config.optimizer == "sa") {
    const SaResult r = anneal(space, objective, config.sa);
    design = r.design;
    value = r.value;
    report["optimizer"] = {
        {"name", "sa"},
        {"seed", config.sa.seed},
        {"initial_temperature", number_json(r.temperature.t0)},
        {"mean_abs_delta", number_json(r.temperature.mean_abs_delta)},
        {"temperature_fallback", r.temperature.fallback},
        {"iterations", r.iterations},
        {"reheats", r.reheats},
        {"stopped_by", to_string(r.stopped_by)},
        {"hit_iteration_cap", r.hit_iteration_cap},
        {"elapsed_seconds", r.elapsed_seconds},
        {"explore", explore_stats_json(r.stats)},
    };
    std::ostringstream trace;
    write_sa_trace_csv(trace, r.trace);
    write_text_file(out / "trace.csv", trace.str());
  } else {
    const TwoStageResult r = two_stage_ce(space, objective, config.ce);
    design = r.design;
    value = r.value;
    json starts = json::array();
    for (const auto& s : r.starts)
      starts.push_back({{"start", s.start},
                        {"seed", s.seed},
                        {"criterion", number_json(s.value)},
                        {"cycles", s.cycles}});
    report["optimizer"] = {
        {"name", "ce"},
        {"seed", config.ce.seed},
        {"master_score", number_json(r.master_score)},
        {"best_start", r.best_start},
        {"evaluations", r.evaluations},
        {"elapsed_seconds", r.elapsed_seconds},
        {"threads", config.ce.threads},
        {"starts", starts},
    };
    std::ostringstream trace, master;
    write_ce_trace_csv(trace, r.trace);
    write_text_file(out / "trace.csv", trace.str());
    write_master_csv(master, r.master);
    write_text_file(out / "master.csv", master.str());
  }

  const ValidationReport check = validate_design(design, space);
  if (!check.ok())
    throw Error(ErrorKind::kNumerical, "the optimizer returned an invalid design");
  save_design(out, "design", design);
  report["criterion"] = to_string(config.criterion);
  report["value"] = number_json(value);
  report["db"] = criterion_values(config, draws, design);
  write_text_file(out / "report.json", dump(report));
  if (!std::isfinite(value))
    throw Error(ErrorKind::kNumerical,
                "every design visited has a singular information matrix under the prior");
}

void run_evaluate(const ScenarioConfig& config, const fs::path& out) {
  if (config.designs.empty()) throw Error(ErrorKind::kConfig, "evaluate needs designs[]");
  const std::vector<DesignEntry> designs = load_designs(config);
  ensure_dir(out);
  const CommonDraws draws = common_draws(config);

  std::vector<std::pair<ModelTag, const ModelSpec*>> models;
  if (config.criterion != ModelTag::kInteraction) models.push_back({ModelTag::kMain, &config.main_model});
  if (config.criterion != ModelTag::kMain)
    models.push_back({ModelTag::kInteraction, &config.interaction_model});

  const auto ref = std::find_if(designs.begin(), designs.end(),
                                [&](const DesignEntry& d) { return d.id == config.reference; });
  json reports = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "design_id,reference_id,model,m,db_x,db_ref,efficiency,num_draws,seed,degenerate\n";
  for (const auto& [tag, model] : models) {
    const PriorDraws& d = tag == ModelTag::kMain ? draws.main : draws.interaction;
    std::vector<double> values(designs.size());
    parallel_for(static_cast<int>(designs.size()), config.threads,
                 [&](int i) { values[i] = db_criterion(designs[i].design, *model, d).value; });
    const double ref_value = values[ref - designs.begin()];
    for (std::size_t i = 0; i < designs.size(); ++i) {
      const EfficiencyResult e = efficiency_from_values(values[i], ref_value, model->num_params());
      const EfficiencyReport r{designs[i].id, ref->id,      tag,  model->num_params(),
                               values[i],     ref_value,    e.efficiency,
                               d.num_draws(), d.seed,       e.degenerate};
      reports.push_back(to_json(r));
      csv << r.design_id << ',' << r.reference_id << ',' << to_string(tag) << ',' << r.m << ','
          << r.db_x << ',' << r.db_ref << ',' << r.efficiency << ',' << r.num_draws << ','
          << r.seed << ',' << (r.degenerate ? 1 : 0) << '\n';
    }
  }

  json doc;
  doc["command"] = "evaluate";
  doc["config"] = config.resolved;
  doc["reports"] = reports;
  if (config.criterion == ModelTag::kRobust) {
    const Objective objective = build_objective(config, draws);
    json robust = json::array();
    for (const auto& d : designs)
      robust.push_back({{"design_id", d.id}, {"value", number_json(objective.evaluate(d.design))}});
    doc["robust"] = robust;
  }
  write_text_file(out / "efficiency.json", dump(doc));
  write_text_file(out / "efficiency.csv", csv.str());
}

void run_simulate(const ScenarioConfig& config, const fs::path& out) {
  const SimulationSettings& sim = config.simulation;
  if (config.designs.empty()) throw Error(ErrorKind::kConfig, "simulate needs designs[]");
  if (sim.true_beta.size() == 0)
    throw Error(ErrorKind::kConfig, "simulate needs simulation.true_beta");
  const std::vector<DesignEntry> designs = load_designs(config);
  ensure_dir(out);

  SimulationPlan plan;
  plan.design = designs.front().design;
  plan.groups = config.survey_groups;
  plan.respondents_per_group = sim.respondents_per_group;
  plan.true_model = sim.true_model;
  plan.true_beta = sim.true_beta;
  plan.num_replications = sim.replications;
  plan.seed = derive_seed(config.seed, kSimulationStream);
  try {
    plan.check();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  const ModelSpec& fit = sim.fit_true_model ? sim.true_model : config.interaction_model;
  const Comparison cmp = compare_designs(designs, plan, fit, config.threads);

  json results = json::array();
  for (const auto& s : cmp.summary)
    results.push_back({{"design_id", s.design_id},
                       {"emse", number_json(s.result.emse)},
                       {"used", s.result.used},
                       {"excluded", s.result.excluded}});
  json doc;
  doc["command"] = "simulate";
  doc["config"] = config.resolved;
  doc["simulation_seed"] = plan.seed;
  doc["fit_params"] = fit.num_params();
  doc["results"] = results;
  write_text_file(out / "emse.json", dump(doc));
  std::ostringstream csv;
  write_replication_csv(csv, cmp.replications);
  write_text_file(out / "replications.csv", csv.str());
  for (const auto& s : cmp.summary)
    if (s.result.used == 0)
      throw Error(ErrorKind::kNumerical, "no replication converged for design '" + s.design_id + "'");
}

void run_benchmark(const ScenarioConfig& config, const fs::path& out) {
  ensure_dir(out);
  const BenchmarkSettings& b = config.benchmark;
  const int n = static_cast<int>(b.scenarios.size()) * b.replicates;
  std::vector<RaceResult> results(n);
  parallel_for(n, config.threads, [&](int i) {
    const int scenario = i / b.replicates;
    results[i] = run_race(b.scenarios[scenario], b.race, i % b.replicates, scenario);
  });

  std::ostringstream csv;
  write_race_csv(csv, b.scenarios, results);
  write_text_file(out / "benchmark.csv", csv.str());

  json rows = json::array();
  std::vector<double> eff;
  for (const auto& r : results) {
    const RaceScenario& s = b.scenarios[r.scenario];
    rows.push_back({{"scenario", r.scenario + 1},
                    {"replicate", r.replicate},
                    {"profiles_per_set", s.profiles_per_set},
                    {"num_constant", s.num_constant},
                    {"interaction_params", s.interaction_params},
                    {"lambda", s.lambda},
                    {"kappa", s.kappa},
                    {"seed", r.seed},
                    {"ce_db", number_json(r.ce_value)},
                    {"sa_db", number_json(r.sa_value)},
                    {"efficiency", number_json(r.efficiency)},
                    {"ce_seconds", r.ce_seconds},
                    {"sa_seconds", r.sa_seconds},
                    {"ce_evaluations", r.ce_evaluations},
                    {"sa_iterations", r.sa_iterations},
                    {"sa_reheats", r.sa_reheats}});
    eff.push_back(r.efficiency);
  }
  double mean = 0.0;
  for (double e : eff) mean += e;
  mean /= std::max<std::size_t>(eff.size(), 1);
  json doc;
  doc["command"] = "benchmark";
  doc["config"] = config.resolved;
  doc["match"] = to_string(b.race.match);
  doc["rows"] = rows;
  doc["median_efficiency"] = number_json(median(eff));
  doc["mean_efficiency"] = number_json(mean);
  write_text_file(out / "benchmark.json", dump(doc));
}

}  // namespace ppd
