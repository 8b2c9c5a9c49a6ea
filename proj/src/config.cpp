#include "ppd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ppd/error.hpp"
#include "ppd/scenarios.hpp"

namespace ppd {

using nlohmann::json;

namespace {

// Minimal JSON walker for locate_line; it trusts that the text already
// parsed.
class Locator {
 public:
  explicit Locator(const std::string& text) : text_(text) {}

  std::size_t find(const std::vector<std::string>& path) {
    pos_ = 0;
    skip_ws();
    std::size_t found = std::string::npos;
    for (const auto& segment : path) {
      if (!descend(segment)) break;
      found = pos_;
    }
    return found;
  }

  std::size_t anchor() const { return anchor_; }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      if (pos_ < text_.size()) out += text_[pos_];
      ++pos_;
    }
    ++pos_;
    return out;
  }

  void skip_value() {
    skip_ws();
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '"') {
      read_string();
      return;
    }
    if (c == '{' || c == '[') {
      int depth = 0;
      while (pos_ < text_.size()) {
        const char x = text_[pos_];
        if (x == '"') {
          read_string();
          continue;
        }
        if (x == '{' || x == '[') ++depth;
        if (x == '}' || x == ']') {
          --depth;
          if (depth == 0) {
            ++pos_;
            return;
          }
        }
        ++pos_;
      }
      return;
    }
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
           text_[pos_] != ']')
      ++pos_;
  }

  bool descend(const std::string& segment) {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    if (text_[pos_] == '{') {
      ++pos_;
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '"') return false;
        const std::size_t key_pos = pos_;
        const std::string key = read_string();
        skip_ws();
        ++pos_;  // colon
        skip_ws();
        if (key == segment) {
          // Report the key's line rather than the value's.
          anchor_ = key_pos;
          return true;
        }
        skip_value();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        else return false;
      }
    }
    if (text_[pos_] == '[') {
      if (segment.empty() ||
          !std::all_of(segment.begin(), segment.end(),
                       [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        return false;
      const int index = std::stoi(segment);
      ++pos_;
      for (int i = 0;; ++i) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] == ']') return false;
        if (i == index) return true;
        skip_value();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        else return false;
      }
    }
    return false;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t anchor_ = std::string::npos;
};

int line_of(const std::string& text, std::size_t pos) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

using Path = std::vector<std::string>;

std::string render(const Path& path) {
  std::string out;
  for (const auto& s : path) {
    const bool index = !s.empty() && std::isdigit(static_cast<unsigned char>(s[0]));
    if (index) out += "[" + s + "]";
    else out += (out.empty() ? "" : ".") + s;
  }
  return out.empty() ? "<root>" : out;
}

Path child(Path path, const std::string& key) {
  path.push_back(key);
  return path;
}

Path child(Path path, std::size_t index) {
  path.push_back(std::to_string(index));
  return path;
}

// Reads the merged document; errors point into the user's text.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const Path& path, const std::string& message) const {
    const int line = locate_line(text_, path);
    std::string where = source_;
    where += line > 0 ? ":" + std::to_string(line) : " (from defaults or preset)";
    throw Error(ErrorKind::kConfig, where + ": " + render(path) + ": " + message);
  }

  void keys(const json& obj, const Path& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(child(path, it.key()), "unknown key");
    }
  }

  const json& at(const json& obj, const Path& path, const std::string& key) const {
    if (!obj.contains(key)) fail(path, "missing key '" + key + "'");
    return obj.at(key);
  }

  long long integer(const json& v, const Path& path, long long lo, long long hi) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
      fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t unsigned64(const json& v, const Path& path) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
    fail(path, "expected a non-negative integer");
  }

  double number(const json& v, const Path& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  double positive(const json& v, const Path& path) const {
    const double x = number(v, path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
  }

  std::string string(const json& v, const Path& path,
                     std::initializer_list<const char*> choices) const {
    if (!v.is_string()) fail(path, "expected a string");
    const std::string s = v.get<std::string>();
    std::string options;
    for (const char* c : choices) {
      if (s == c) return s;
      options += std::string(options.empty() ? "" : ", ") + c;
    }
    fail(path, "'" + s + "' is not one of " + options);
  }

  const json& array(const json& v, const Path& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  std::vector<AttributePair> pairs(const json& v, const Path& path, int k_count) const {
    std::vector<AttributePair> out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i) {
      const Path p = child(path, i);
      const json& pair = v[i];
      if (!pair.is_array() || pair.size() != 2) fail(p, "expected a pair [a, b]");
      const int a = static_cast<int>(integer(pair[0], child(p, 0), 1, k_count)) - 1;
      const int b = static_cast<int>(integer(pair[1], child(p, 1), 1, k_count)) - 1;
      if (a == b) fail(p, "an attribute cannot interact with itself");
      const AttributePair ab{std::min(a, b), std::max(a, b)};
      if (std::find(out.begin(), out.end(), ab) != out.end()) fail(p, "duplicate interaction");
      out.push_back(ab);
    }
    return out;
  }

  Eigen::VectorXd vector(const json& v, const Path& path) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(array(v, path).size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = number(v[i], child(path, i));
    return out;
  }

  Eigen::MatrixXd matrix(const json& v, const Path& path, int n) const {
    if (static_cast<int>(array(v, path).size()) != n)
      fail(path, "expected " + std::to_string(n) + " rows");
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i) {
      const Path p = child(path, static_cast<std::size_t>(i));
      if (!v[i].is_array() || static_cast<int>(v[i].size()) != n)
        fail(p, "expected " + std::to_string(n) + " entries");
      for (int j = 0; j < n; ++j) out(i, j) = number(v[i][j], child(p, static_cast<std::size_t>(j)));
    }
    return out;
  }

 private:
  const std::string& text_;
  std::string source_;
};

// Objects merge key by key; everything else, including arrays and the
// prior block, is replaced.
void merge(json& base, const json& patch, bool top = true) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const bool replace = !base.contains(it.key()) || !base[it.key()].is_object() ||
                         !it.value().is_object() || (top && it.key() == "prior");
    if (replace) base[it.key()] = it.value();
    else merge(base[it.key()], it.value(), false);
  }
}

json pairs_json(const std::vector<AttributePair>& pairs) {
  json out = json::array();
  for (const auto& p : pairs) out.push_back({p.first + 1, p.second + 1});
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

bool in_family_set(double x) {
  for (double v : {1.0, 1.0 / 2.0, 1.0 / 3.0})
    if (std::abs(x - v) < 1e-9) return true;
  return false;
}

const char* master_objective_name(const MasterObjective& o) {
  if (o.kind == MasterObjective::Kind::kDOptimal) return "d_optimal";
  return o.scheme == VarianceBalance::kI ? "a_weighted_i" : "a_weighted_ii";
}

}  // namespace

int locate_line(const std::string& text, const std::vector<std::string>& path) {
  // The deepest segment found wins; try shorter prefixes when the full path
  // is absent from the text.
  for (std::size_t n = path.size(); n > 0; --n) {
    Locator loc(text);
    const Path prefix(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(n));
    const std::size_t pos = loc.find(prefix);
    if (pos == std::string::npos) continue;
    const bool last_is_key =
        !prefix.back().empty() && !std::isdigit(static_cast<unsigned char>(prefix.back()[0]));
    const std::size_t at = last_is_key && loc.anchor() != std::string::npos ? loc.anchor() : pos;
    return line_of(text, at);
  }
  return 0;
}

json default_config() {
  const SaConfig sa;
  const CeConfig ce;
  return {
      {"preset", nullptr},
      {"space",
       {{"num_choice_sets", 24},
        {"profiles_per_set", 2},
        {"levels", {2, 2, 2, 3, 3, 3}},
        {"num_constant", 1},
        {"forbidden", json::array()}}},
      {"model", {{"interactions", json::array()}}},
      {"criterion", "main"},
      {"robust_weights", {{"main", 1.0}, {"interaction", 1.0}}},
      {"prior", {{"lambda", 1.0}, {"kappa", 1.0}}},
      {"draws", kDefaultNumDraws},
      {"sampling", "qmc"},
      {"optimizer",
       {{"name", "sa"},
        {"sa",
         {{"reheat_stall", sa.reheat_stall},
          {"stopping", to_string(sa.stopping)},
          {"max_runtime_seconds", sa.max_runtime_seconds},
          {"max_reheats", sa.max_reheats},
          {"gamma", nullptr},
          {"random_walk_steps", sa.random_walk_steps},
          {"max_iterations", sa.max_iterations},
          {"trace_stride", sa.trace_stride}}},
        {"ce",
         {{"num_starts", ce.num_starts},
          {"max_cycles", ce.max_cycles},
          {"master_objective", master_objective_name(ce.master_objective)},
          {"master_restarts", ce.master_restarts}}}}},
      {"seed", 0},
      {"threads", 1},
      {"survey_groups", json::array()},
      {"designs", json::array()},
      {"reference", nullptr},
      {"simulation",
       {{"respondents_per_group", 100},
        {"replications", 500},
        {"true_interactions", json::array()},
        {"true_beta", nullptr},
        {"fit_model", "true"}}},
      {"benchmark",
       {{"grid",
         {{"profiles_per_set", {2}},
          {"num_constant", {1}},
          {"interaction_params", {0}},
          {"lambda", {1.0}},
          {"kappa", {1.0}}}},
        {"replicates", 1},
        {"ce_starts", 5},
        {"match", "runtime"}}},
  };
}

json preset_config(const std::string& name) {
  if (name == "benchmark") {
    return {
        {"space", {{"num_choice_sets", 24}, {"levels", {2, 2, 2, 3, 3, 3}}}},
        {"benchmark",
         {{"grid",
           {{"profiles_per_set", {2, 3}},
            {"num_constant", {1, 2}},
            {"interaction_params", {0, 2, 6, 8}},
            {"lambda", {1.0, 1.0 / 2.0, 1.0 / 3.0}},
            {"kappa", {1.0, 1.0 / 2.0, 1.0 / 3.0}}}},
          {"ce_starts", 30}}},
    };
  }
  if (name == "case_study") {
    const PriorSpec main = case_study_main_prior();
    json forbidden = json::array();
    for (const auto& f : case_study_forbidden()) {
      json term = json::object();
      for (const auto& t : f.terms) term["x" + std::to_string(t.attribute + 1)] = t.level;
      forbidden.push_back(term);
    }
    json groups = json::array();
    for (const auto& g : case_study_groups()) {
      json row = json::array();
      for (int s : g) row.push_back(s + 1);
      groups.push_back(row);
    }
    return {
        {"space",
         {{"num_choice_sets", 42},
          {"profiles_per_set", 2},
          {"levels", case_study_levels()},
          {"num_constant", 3},
          {"forbidden", forbidden}}},
        {"model", {{"interactions", pairs_json(case_study_design_interactions())}}},
        {"criterion", "robust"},
        {"prior",
         {{"mean", vector_json(main.mean)},
          {"covariance", matrix_json(main.covariance)},
          {"interaction_mean", 0.0},
          {"interaction_variance", 1.0}}},
        {"survey_groups", groups},
        {"designs", {{{"id", "original"}, {"path", "builtin:case_study_original"}}}},
        {"simulation",
         {{"true_interactions", pairs_json(case_study_true_interactions())},
          {"true_beta", vector_json(case_study_true_beta())}}},
    };
  }
  throw Error(ErrorKind::kConfig, "unknown preset '" + name + "' (benchmark, case_study)");
}

DesignSpace ScenarioConfig::space() const {
  return DesignSpace(num_sets, profiles_per_set, levels, num_constant, forbidden);
}

const ModelSpec& ScenarioConfig::criterion_model() const {
  return criterion == ModelTag::kMain ? main_model : interaction_model;
}

PriorSpec ScenarioConfig::main_prior() const {
  return main_block(prior, main_model.num_params());
}

ScenarioConfig parse_config(const std::string& text, const std::string& source_name,
                            const ConfigOverrides& overrides) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    throw Error(ErrorKind::kConfig,
                source_name + ":" + std::to_string(line_of(text, pos)) + ": " + e.what());
  }
  const Reader rd(text, source_name);
  if (!user.is_object()) rd.fail({}, "the document must be an object");

  json doc = default_config();
  if (user.contains("preset") && !user["preset"].is_null()) {
    const std::string name =
        rd.string(user["preset"], {"preset"}, {"benchmark", "case_study"});
    merge(doc, preset_config(name));
  }
  merge(doc, user);
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.draws) doc["draws"] = *overrides.draws;
  if (overrides.threads) doc["threads"] = *overrides.threads;

  rd.keys(doc, {},
          {"preset", "space", "model", "criterion", "robust_weights", "prior", "draws",
           "sampling", "optimizer", "seed", "threads", "survey_groups", "designs", "reference",
           "simulation", "benchmark"});

  ScenarioConfig cfg;

  // Design space.
  const json& space = doc["space"];
  const Path ps{"space"};
  rd.keys(space, ps, {"num_choice_sets", "profiles_per_set", "levels", "num_constant", "forbidden"});
  cfg.num_sets = static_cast<int>(rd.integer(rd.at(space, ps, "num_choice_sets"),
                                             child(ps, "num_choice_sets"), 1, 100000));
  cfg.profiles_per_set = static_cast<int>(rd.integer(rd.at(space, ps, "profiles_per_set"),
                                                     child(ps, "profiles_per_set"), 2, 1000));
  const json& levels = rd.array(rd.at(space, ps, "levels"), child(ps, "levels"));
  if (levels.empty()) rd.fail(child(ps, "levels"), "needs at least one attribute");
  for (std::size_t i = 0; i < levels.size(); ++i)
    cfg.levels.push_back(static_cast<int>(rd.integer(levels[i], child(child(ps, "levels"), i), 2, 1000)));
  const int k_count = static_cast<int>(cfg.levels.size());
  cfg.num_constant = static_cast<int>(rd.integer(rd.at(space, ps, "num_constant"),
                                                 child(ps, "num_constant"), 0, k_count - 1));
  const json& forbidden = rd.array(rd.at(space, ps, "forbidden"), child(ps, "forbidden"));
  for (std::size_t i = 0; i < forbidden.size(); ++i) {
    const Path p = child(child(ps, "forbidden"), i);
    if (!forbidden[i].is_object() || forbidden[i].empty())
      rd.fail(p, "expected an object such as {\"x1\": 2, \"x6\": 1}");
    ForbiddenCombination combo;
    for (auto it = forbidden[i].begin(); it != forbidden[i].end(); ++it) {
      const std::string& key = it.key();
      const bool named = key.size() > 1 && key[0] == 'x' &&
                         std::all_of(key.begin() + 1, key.end(), [](char c) {
                           return std::isdigit(static_cast<unsigned char>(c));
                         });
      if (!named) rd.fail(child(p, key), "attribute keys are x1, x2, ...");
      const int a = std::stoi(key.substr(1));
      if (a < 1 || a > k_count) rd.fail(child(p, key), "no such attribute");
      const int level = static_cast<int>(rd.integer(it.value(), child(p, key), 1, cfg.levels[a - 1]));
      combo.terms.push_back({a - 1, level});
    }
    cfg.forbidden.push_back(combo);
  }
  try {
    (void)cfg.space();
  } catch (const Error& e) {
    rd.fail(ps, e.what());
  }

  // Models and criterion.
  const json& model = doc["model"];
  rd.keys(model, {"model"}, {"interactions"});
  const auto interactions =
      rd.pairs(rd.at(model, {"model"}, "interactions"), {"model", "interactions"}, k_count);
  cfg.main_model = ModelSpec(cfg.levels);
  cfg.interaction_model = ModelSpec(cfg.levels, interactions);
  cfg.criterion = model_tag_from_string(
      rd.string(doc["criterion"], {"criterion"}, {"main", "interaction", "robust"}));
  if (cfg.criterion != ModelTag::kMain && interactions.empty())
    rd.fail({"criterion"}, "needs model.interactions");

  const json& weights = doc["robust_weights"];
  rd.keys(weights, {"robust_weights"}, {"main", "interaction"});
  cfg.main_weight = rd.positive(rd.at(weights, {"robust_weights"}, "main"), {"robust_weights", "main"});
  cfg.interaction_weight = rd.positive(rd.at(weights, {"robust_weights"}, "interaction"),
                                       {"robust_weights", "interaction"});

  // Prior over the interaction model.
  const json& prior = doc["prior"];
  const Path pp{"prior"};
  const int m_main = cfg.main_model.num_params();
  const int m_full = cfg.interaction_model.num_params();
  if (prior.is_object() && prior.contains("mean")) {
    rd.keys(prior, pp, {"mean", "covariance", "interaction_mean", "interaction_variance"});
    const Eigen::VectorXd mean = rd.vector(prior["mean"], child(pp, "mean"));
    const int n = static_cast<int>(mean.size());
    if (n != m_main && n != m_full)
      rd.fail(child(pp, "mean"), "has " + std::to_string(n) + " entries; the model has " +
                                     std::to_string(m_main) + " main and " +
                                     std::to_string(m_full) + " total parameters");
    PriorSpec given{mean, rd.matrix(rd.at(prior, pp, "covariance"), child(pp, "covariance"), n)};
    try {
      check_prior(given);
    } catch (const Error& e) {
      rd.fail(child(pp, "covariance"), e.what());
    }
    if (!prior.contains("interaction_mean")) doc["prior"]["interaction_mean"] = 0.0;
    if (!prior.contains("interaction_variance")) doc["prior"]["interaction_variance"] = 1.0;
    const double imean = rd.number(doc["prior"]["interaction_mean"], child(pp, "interaction_mean"));
    const double ivar =
        rd.positive(doc["prior"]["interaction_variance"], child(pp, "interaction_variance"));
    cfg.prior = n == m_full ? given : extend_prior(given, m_full, imean, ivar);
  } else {
    rd.keys(prior, pp, {"lambda", "kappa"});
    const double lambda = rd.positive(rd.at(prior, pp, "lambda"), child(pp, "lambda"));
    const double kappa = rd.positive(rd.at(prior, pp, "kappa"), child(pp, "kappa"));
    if (!in_family_set(lambda))
      rd.fail(child(pp, "lambda"), "must be 1, 1/2 or 1/3; give prior.mean and prior.covariance for other values");
    if (!in_family_set(kappa))
      rd.fail(child(pp, "kappa"), "must be 1, 1/2 or 1/3; give prior.mean and prior.covariance for other values");
    cfg.prior = build_prior_family(cfg.levels, interactions, lambda, kappa, InteractionPrior::kNaive);
  }

  cfg.draws = static_cast<int>(rd.integer(doc["draws"], {"draws"}, 1, 1 << 20));
  cfg.sampling = rd.string(doc["sampling"], {"sampling"}, {"qmc", "pseudo_random"}) == "qmc"
                     ? SamplingMethod::kQuasiMonteCarlo
                     : SamplingMethod::kPseudoRandom;
  cfg.seed = rd.unsigned64(doc["seed"], {"seed"});
  cfg.threads = static_cast<int>(rd.integer(doc["threads"], {"threads"}, 1, 4096));

  // Optimizers.
  const json& opt = doc["optimizer"];
  const Path po{"optimizer"};
  rd.keys(opt, po, {"name", "sa", "ce"});
  cfg.optimizer = rd.string(rd.at(opt, po, "name"), child(po, "name"), {"sa", "ce"});
  {
    const json& sa = rd.at(opt, po, "sa");
    const Path p = child(po, "sa");
    rd.keys(sa, p, {"reheat_stall", "stopping", "max_runtime_seconds", "max_reheats", "gamma",
                    "random_walk_steps", "max_iterations", "trace_stride"});
    cfg.sa.reheat_stall = static_cast<int>(rd.integer(rd.at(sa, p, "reheat_stall"), child(p, "reheat_stall"), 1, 1 << 30));
    cfg.sa.stopping = stopping_rule_from_string(rd.string(
        rd.at(sa, p, "stopping"), child(p, "stopping"),
        {"max_runtime", "max_reheats", "no_improvement_over_reheat_cycle"}));
    cfg.sa.max_runtime_seconds = rd.positive(rd.at(sa, p, "max_runtime_seconds"), child(p, "max_runtime_seconds"));
    cfg.sa.max_reheats = static_cast<int>(rd.integer(rd.at(sa, p, "max_reheats"), child(p, "max_reheats"), 1, 1 << 30));
    const json& gamma = rd.at(sa, p, "gamma");
    if (!gamma.is_null()) {
      const double g = rd.number(gamma, child(p, "gamma"));
      if (g < 0.0 || g > 1.0) rd.fail(child(p, "gamma"), "must lie in [0, 1]");
      cfg.sa.gamma = g;
    }
    cfg.sa.random_walk_steps = static_cast<int>(rd.integer(rd.at(sa, p, "random_walk_steps"), child(p, "random_walk_steps"), 2, 1 << 30));
    cfg.sa.max_iterations = rd.integer(rd.at(sa, p, "max_iterations"), child(p, "max_iterations"), 0, 1LL << 60);
    cfg.sa.trace_stride = static_cast<int>(rd.integer(rd.at(sa, p, "trace_stride"), child(p, "trace_stride"), 1, 1 << 30));
    cfg.sa.seed = cfg.seed;
    doc["optimizer"]["sa"]["gamma"] = cfg.sa.resolved_gamma(cfg.space());
  }
  {
    const json& ce = rd.at(opt, po, "ce");
    const Path p = child(po, "ce");
    rd.keys(ce, p, {"num_starts", "max_cycles", "master_objective", "master_restarts"});
    cfg.ce.num_starts = static_cast<int>(rd.integer(rd.at(ce, p, "num_starts"), child(p, "num_starts"), 1, 1 << 20));
    cfg.ce.max_cycles = static_cast<int>(rd.integer(rd.at(ce, p, "max_cycles"), child(p, "max_cycles"), 0, 1 << 30));
    const std::string mo = rd.string(rd.at(ce, p, "master_objective"), child(p, "master_objective"),
                                     {"d_optimal", "a_weighted_i", "a_weighted_ii"});
    cfg.ce.master_objective = mo == "d_optimal"      ? MasterObjective::d_optimal()
                              : mo == "a_weighted_i" ? MasterObjective::a_weighted(VarianceBalance::kI)
                                                     : MasterObjective::a_weighted(VarianceBalance::kII);
    cfg.ce.master_restarts = static_cast<int>(rd.integer(rd.at(ce, p, "master_restarts"), child(p, "master_restarts"), 1, 1 << 20));
    cfg.ce.seed = cfg.seed;
    cfg.ce.threads = cfg.threads;
  }

  // Survey groups: a count of equal consecutive groups or explicit lists.
  {
    const json& g = doc["survey_groups"];
    const Path p{"survey_groups"};
    if (g.is_number_integer()) {
      const int n = static_cast<int>(rd.integer(g, p, 1, cfg.num_sets));
      if (cfg.num_sets % n != 0) rd.fail(p, "does not divide num_choice_sets");
      const int size = cfg.num_sets / n;
      for (int i = 0; i < n; ++i) {
        cfg.survey_groups.emplace_back();
        for (int s = 0; s < size; ++s) cfg.survey_groups.back().push_back(i * size + s);
      }
    } else {
      std::vector<int> seen(cfg.num_sets, 0);
      for (std::size_t i = 0; i < rd.array(g, p).size(); ++i) {
        const Path pi = child(p, i);
        cfg.survey_groups.emplace_back();
        for (std::size_t j = 0; j < rd.array(g[i], pi).size(); ++j) {
          const int s = static_cast<int>(rd.integer(g[i][j], child(pi, j), 1, cfg.num_sets)) - 1;
          if (seen[s]++) rd.fail(child(pi, j), "set listed twice");
          cfg.survey_groups.back().push_back(s);
        }
      }
      if (!cfg.survey_groups.empty() && std::count(seen.begin(), seen.end(), 0) > 0)
        rd.fail(p, "groups must cover every choice set");
    }
    json groups = json::array();
    for (const auto& gr : cfg.survey_groups) {
      json row = json::array();
      for (int s : gr) row.push_back(s + 1);
      groups.push_back(row);
    }
    doc["survey_groups"] = groups;
  }

  // Designs to evaluate or simulate.
  {
    const json& ds = doc["designs"];
    const Path p{"designs"};
    for (std::size_t i = 0; i < rd.array(ds, p).size(); ++i) {
      const Path pi = child(p, i);
      rd.keys(ds[i], pi, {"id", "path"});
      DesignRef ref;
      if (!rd.at(ds[i], pi, "id").is_string()) rd.fail(child(pi, "id"), "expected a string");
      ref.id = ds[i]["id"].get<std::string>();
      if (ref.id.empty() || ref.id.find_first_of(",\n\"") != std::string::npos)
        rd.fail(child(pi, "id"), "must be non-empty without commas or quotes");
      for (const auto& other : cfg.designs)
        if (other.id == ref.id) rd.fail(child(pi, "id"), "duplicate design id");
      if (!rd.at(ds[i], pi, "path").is_string()) rd.fail(child(pi, "path"), "expected a string");
      ref.path = ds[i]["path"].get<std::string>();
      cfg.designs.push_back(ref);
    }
    const json& r = doc["reference"];
    if (r.is_null()) {
      if (!cfg.designs.empty()) cfg.reference = cfg.designs.front().id;
    } else {
      if (!r.is_string()) rd.fail({"reference"}, "expected a design id");
      cfg.reference = r.get<std::string>();
      const bool known = std::any_of(cfg.designs.begin(), cfg.designs.end(),
                                     [&](const DesignRef& d) { return d.id == cfg.reference; });
      if (!known) rd.fail({"reference"}, "not among designs[].id");
    }
    if (!cfg.reference.empty()) doc["reference"] = cfg.reference;
  }

  // Simulation.
  {
    const json& sim = doc["simulation"];
    const Path p{"simulation"};
    rd.keys(sim, p, {"respondents_per_group", "replications", "true_interactions", "true_beta", "fit_model"});
    cfg.simulation.respondents_per_group = static_cast<int>(rd.integer(
        rd.at(sim, p, "respondents_per_group"), child(p, "respondents_per_group"), 1, 1 << 24));
    cfg.simulation.replications = static_cast<int>(
        rd.integer(rd.at(sim, p, "replications"), child(p, "replications"), 1, 1 << 24));
    cfg.simulation.true_model = ModelSpec(
        cfg.levels, rd.pairs(rd.at(sim, p, "true_interactions"), child(p, "true_interactions"), k_count));
    const json& beta = rd.at(sim, p, "true_beta");
    if (!beta.is_null()) {
      cfg.simulation.true_beta = rd.vector(beta, child(p, "true_beta"));
      if (cfg.simulation.true_beta.size() != cfg.simulation.true_model.num_params())
        rd.fail(child(p, "true_beta"),
                "needs " + std::to_string(cfg.simulation.true_model.num_params()) + " entries");
    }
    cfg.simulation.fit_true_model =
        rd.string(rd.at(sim, p, "fit_model"), child(p, "fit_model"), {"true", "design"}) == "true";
    if (!cfg.simulation.fit_true_model)
      for (const auto& pair : cfg.simulation.true_model.interactions())
        if (std::find(interactions.begin(), interactions.end(), pair) == interactions.end())
          rd.fail(child(p, "fit_model"),
                  "the design model lacks a true interaction, so it cannot be fitted");
  }

  // Benchmark grid.
  {
    const json& b = doc["benchmark"];
    const Path p{"benchmark"};
    rd.keys(b, p, {"grid", "replicates", "ce_starts", "match"});
    const json& grid = rd.at(b, p, "grid");
    const Path pg = child(p, "grid");
    rd.keys(grid, pg, {"profiles_per_set", "num_constant", "interaction_params", "lambda", "kappa"});
    auto ints = [&](const char* key, long long lo, long long hi) {
      std::vector<int> out;
      const Path pk = child(pg, key);
      const json& v = rd.array(rd.at(grid, pg, key), pk);
      if (v.empty()) rd.fail(pk, "needs at least one value");
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<int>(rd.integer(v[i], child(pk, i), lo, hi)));
      return out;
    };
    auto family = [&](const char* key) {
      std::vector<double> out;
      const Path pk = child(pg, key);
      const json& v = rd.array(rd.at(grid, pg, key), pk);
      if (v.empty()) rd.fail(pk, "needs at least one value");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = rd.positive(v[i], child(pk, i));
        if (!in_family_set(x)) rd.fail(child(pk, i), "must be 1, 1/2 or 1/3");
        out.push_back(x);
      }
      return out;
    };
    const auto js = ints("profiles_per_set", 2, 1000);
    const auto fs = ints("num_constant", 0, k_count - 1);
    const auto ns = ints("interaction_params", 0, 1 << 20);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      try {
        (void)scenario_interactions(cfg.levels, ns[i]);
      } catch (const Error& e) {
        rd.fail(child(child(pg, "interaction_params"), i), e.what());
      }
    }
    cfg.benchmark.scenarios = expand_grid(js, fs, ns, family("lambda"), family("kappa"));
    cfg.benchmark.replicates =
        static_cast<int>(rd.integer(rd.at(b, p, "replicates"), child(p, "replicates"), 1, 1 << 20));
    RaceConfig& race = cfg.benchmark.race;
    race.num_sets = cfg.num_sets;
    race.levels = cfg.levels;
    race.draws = cfg.draws;
    race.sampling = cfg.sampling;
    race.ce = cfg.ce;
    race.ce.num_starts =
        static_cast<int>(rd.integer(rd.at(b, p, "ce_starts"), child(p, "ce_starts"), 1, 1 << 20));
    race.sa = cfg.sa;
    race.match = budget_match_from_string(
        rd.string(rd.at(b, p, "match"), child(p, "match"), {"runtime", "evaluations"}));
    race.seed = cfg.seed;
  }

  cfg.resolved = std::move(doc);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  ScenarioConfig cfg = parse_config(text.str(), path.string(), overrides);
  cfg.base_dir = path.parent_path();
  return cfg;
}

}  // namespace ppd
