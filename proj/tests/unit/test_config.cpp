#include <doctest.h>

#include <string>

#include "ppd/config.hpp"
#include "ppd/error.hpp"
#include "ppd/scenarios.hpp"

using namespace ppd;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("an empty document resolves to the defaults") {
  const ScenarioConfig cfg = parse_config("{}", "cfg.json");
  CHECK(cfg.space() == benchmark_space(2, 1));
  CHECK(cfg.criterion == ModelTag::kMain);
  CHECK(cfg.draws == kDefaultNumDraws);
  CHECK(cfg.optimizer == "sa");
  const PriorSpec family = build_prior_family(benchmark_levels(), {}, 1.0, 1.0);
  CHECK(cfg.prior.mean == family.mean);
  CHECK(cfg.prior.covariance == family.covariance);

  // The echo carries every default, with gamma and the groups filled in.
  const auto& r = cfg.resolved;
  CHECK(r["optimizer"]["sa"]["gamma"].get<double>() == doctest::Approx(1.0 / 6.0));
  CHECK(r["optimizer"]["ce"]["num_starts"] == 30);
  CHECK(r["simulation"]["replications"] == 500);
  CHECK(r["benchmark"]["match"] == "runtime");
  CHECK(r.contains("reference"));
  const ScenarioConfig again = parse_config(r.dump(), "echo.json");
  CHECK(again.resolved == r);
}

TEST_CASE("overrides win over the file") {
  ConfigOverrides o;
  o.seed = 99;
  o.draws = 16;
  o.threads = 3;
  const ScenarioConfig cfg = parse_config(R"({"seed": 1, "draws": 8})", "cfg.json", o);
  CHECK(cfg.seed == 99);
  CHECK(cfg.sa.seed == 99);
  CHECK(cfg.ce.seed == 99);
  CHECK(cfg.draws == 16);
  CHECK(cfg.threads == 3);
  CHECK(cfg.resolved["seed"] == 99);
}

TEST_CASE("diagnostics name the line and key") {
  const std::string unknown = config_error("{\n  \"space\": {\n    \"levelz\": [2, 2]\n  }\n}");
  CHECK(contains(unknown, "cfg.json:3:"));
  CHECK(contains(unknown, "space.levelz"));

  const std::string lambda =
      config_error("{\n  \"prior\": {\n    \"kappa\": 1,\n    \"lambda\": 0.4\n  }\n}");
  CHECK(contains(lambda, "cfg.json:4:"));
  CHECK(contains(lambda, "prior.lambda"));

  const std::string level =
      config_error("{\"space\": {\n\"levels\": [2,\n 2,\n 1]}}");
  CHECK(contains(level, "cfg.json:4:"));
  CHECK(contains(level, "space.levels[2]"));

  const std::string syntax = config_error("{\n  \"seed\": 1,\n  ]\n}");
  CHECK(contains(syntax, "cfg.json:3:"));

  CHECK(contains(config_error(R"({"criterion": "robust"})"), "model.interactions"));
  CHECK(contains(config_error(R"({"optimizer": {"name": "ga"}})"), "optimizer.name"));
  CHECK(contains(config_error(R"({"space": {"num_constant": 6}})"), "space.num_constant"));
  CHECK(contains(config_error(R"({"survey_groups": 5})"), "survey_groups"));
  CHECK(contains(config_error(R"({"reference": "nope"})"), "reference"));
  CHECK(contains(config_error(R"({"benchmark": {"grid": {"interaction_params": [3]}}})"),
                 "benchmark.grid.interaction_params[0]"));
  CHECK(contains(config_error(R"({"simulation": {"true_beta": [1, 2]}})"), "simulation.true_beta"));
  CHECK(contains(config_error(R"({"preset": "nope"})"), "preset"));
}

TEST_CASE("locate_line") {
  const std::string text = "{\n\"a\": {\"b\": [\n1,\n{\"c\": 2}\n]}\n}";
  CHECK(locate_line(text, {"a"}) == 2);
  CHECK(locate_line(text, {"a", "b", "1", "c"}) == 4);
  CHECK(locate_line(text, {"a", "b", "0"}) == 3);
  // Falls back to the deepest prefix present.
  CHECK(locate_line(text, {"a", "x"}) == 2);
  CHECK(locate_line(text, {"zz"}) == 0);
}

TEST_CASE("explicit main prior with naive interactions") {
  const ScenarioConfig cfg = parse_config(R"({
    "model": {"interactions": [[1, 2]]},
    "criterion": "interaction",
    "prior": {"mean": [-1, -1, -1, -1, 0, -1, 0, -1, 0],
              "covariance": [[1,0,0,0,0,0,0,0,0],[0,1,0,0,0,0,0,0,0],[0,0,1,0,0,0,0,0,0],
                             [0,0,0,1,0,0,0,0,0],[0,0,0,0,1,0,0,0,0],[0,0,0,0,0,1,0,0,0],
                             [0,0,0,0,0,0,1,0,0],[0,0,0,0,0,0,0,1,0],[0,0,0,0,0,0,0,0,1]],
              "interaction_variance": 0.25}
  })", "cfg.json");
  CHECK(cfg.prior.dim() == 10);
  CHECK(cfg.prior.mean(9) == 0.0);
  CHECK(cfg.prior.covariance(9, 9) == 0.25);
  CHECK(cfg.main_prior().dim() == 9);
  CHECK(cfg.resolved["prior"]["interaction_mean"] == 0.0);
}

TEST_CASE("case study preset") {
  const ScenarioConfig cfg = parse_config(R"({"preset": "case_study"})", "cfg.json");
  CHECK(cfg.space() == case_study_space());
  CHECK(cfg.criterion == ModelTag::kRobust);
  const PriorSpec robust = case_study_robust_prior();
  CHECK(cfg.prior.mean.isApprox(robust.mean));
  CHECK(cfg.prior.covariance.isApprox(robust.covariance));
  CHECK(cfg.survey_groups == case_study_groups());
  CHECK(cfg.simulation.true_model ==
        ModelSpec(case_study_levels(), case_study_true_interactions()));
  CHECK(cfg.simulation.true_beta.isApprox(case_study_true_beta()));
  REQUIRE(cfg.designs.size() == 1);
  CHECK(cfg.reference == "original");
}

TEST_CASE("benchmark preset is the full grid") {
  const ScenarioConfig cfg = parse_config(R"({"preset": "benchmark"})", "cfg.json");
  CHECK(cfg.benchmark.scenarios.size() == 144);
  CHECK(cfg.benchmark.race.ce.num_starts == 30);
}

TEST_CASE("survey groups and forbidden combinations") {
  const ScenarioConfig cfg = parse_config(R"({
    "survey_groups": 3,
    "space": {"forbidden": [{"x1": 2, "x4": 3}]}
  })", "cfg.json");
  REQUIRE(cfg.survey_groups.size() == 3);
  CHECK(cfg.survey_groups[1].front() == 8);
  CHECK(cfg.resolved["survey_groups"][1][0] == 9);
  REQUIRE(cfg.forbidden.size() == 1);
  CHECK(cfg.forbidden[0].terms[1] == AttributeLevel{3, 3});
  CHECK(contains(config_error(R"({"survey_groups": [[1, 2], [2]]})"), "set listed twice"));
}
