#pragma once

// Experiment configuration: a strict JSON document with documented defaults.
// Unknown keys are rejected, command-line overrides use dotted paths
// (`solver.eta0=0.05`), and the canonical dump (sorted keys) feeds a stable hash.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zominmax/errors.hpp"
#include "zominmax/oracle.hpp"
#include "zominmax/solvers.hpp"

namespace zominmax {

using Json = nlohmann::json;

struct SyntheticConfig {
  std::size_t n = 500;
  std::size_t d = 10;
  double noise_std = 0.1;
  std::size_t strategic = 5;
  std::uint64_t seed = 0;
};

struct DatasetConfig {
  std::optional<std::string> path;  // CSV file; synthetic data when absent
  std::string label_column = "label";
  bool standardize = false;
  std::optional<std::vector<std::string>> strategic_columns;
  std::optional<std::size_t> balance;  // balanced subsample size
  std::uint64_t balance_seed = 0;
  SyntheticConfig synthetic;
};

struct ToyConfig {
  std::size_t n = 8;
  std::size_t d = 4;
  std::uint64_t seed = 0;
};

struct ModelConfig {
  double zeta = 0.05;
  std::optional<std::vector<std::size_t>> mask;  // strategic feature indices; dataset default when absent
};

struct ObjectiveConfig {
  double delta = 0.4;
  double kappa = 0.5;
  std::optional<double> alpha_max;  // 10 (beta + 1) when absent
  std::string link = "logistic";
};

struct SolverSection {
  std::string variant = "ogda_rr";  // or "all"
  std::size_t epochs = 500;
  double eta0 = 0.05;
  double eps0 = 1.0;
  double chi = 0.1;
  std::optional<double> eta_exponent;
  double eps_exponent = 0.25;
  std::string estimator_mode = "hybrid";
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  std::optional<double> smoothness;
};

struct ReferenceSection {
  bool enabled = true;
  double tol = 1e-10;
  std::size_t max_iters = 1'000'000;
  std::string method = "ogda";
};

struct OutputsSection {
  std::string dir = "out";
  std::string trace_csv = "trace.csv";
  std::optional<std::string> plot_svg;
  std::size_t snapshot_every = 0;
  bool wall_time = false;  // fill wall_time_ms; makes traces run-dependent
};

struct CompareSection {
  std::size_t repeats = 1;
};

struct RobustnessSection {
  std::vector<double> zetas{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::optional<std::string> classifier;  // theta CSV written by solve; outputs.dir/theta.csv when absent
  std::size_t baseline_iterations = 5000;
};

struct SweepSection {
  std::vector<std::size_t> ns{50, 100};
  std::vector<std::size_t> ds{5, 10};
  double target = 0.1;
  std::size_t epoch_cap = 5000;
};

struct ExperimentConfig {
  std::string problem = "wdrsc";  // or "toy-bilinear"
  DatasetConfig dataset;
  ToyConfig toy;
  ModelConfig model;
  ObjectiveConfig objective;
  SolverSection solver;
  ReferenceSection reference;
  OutputsSection outputs;
  CompareSection compare;
  RobustnessSection robustness;
  SweepSection sweep;

  Schedule schedule() const {
    Schedule s;
    s.eta0 = solver.eta0;
    s.eps0 = solver.eps0;
    s.chi = solver.chi;
    s.eta_exponent = solver.eta_exponent;
    s.eps_exponent = solver.eps_exponent;
    return s;
  }

  EstimatorMode mode() const {
    return solver.estimator_mode == "full_zo" ? EstimatorMode::full_zo : EstimatorMode::hybrid;
  }

  std::vector<Variant> variants() const {
    if (solver.variant == "all") return {std::begin(kAllVariants), std::end(kAllVariants)};
    return {parse_variant(solver.variant)};
  }

  ReferenceOptions reference_options() const {
    ReferenceOptions r;
    r.tol = reference.tol;
    r.max_iters = reference.max_iters;
    r.method = reference.method == "gda" ? ReferenceMethod::gda : ReferenceMethod::ogda;
    return r;
  }
};

namespace detail {

template <typename T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

class Reader {
 public:
  Reader(const Json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {}

  template <typename T>
  void get(const char* key, T& out) const {
    const Json& v = at(key);
    try {
      out = v.get<T>();
    } catch (const Json::exception&) {
      throw ConfigError("config key '" + path(key) + "' has the wrong type: " + v.dump());
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) const {
    const Json& v = at(key);
    if (v.is_null()) {
      out.reset();
      return;
    }
    T tmp{};
    get(key, tmp);
    out = std::move(tmp);
  }

  Reader sub(const char* key) const {
    const Json& v = at(key);
    if (!v.is_object()) throw ConfigError("config key '" + path(key) + "' must be an object");
    return Reader(v, path(key));
  }

  std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  const Json& at(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError("config key '" + path(key) + "' is missing");
    return *it;
  }

  const Json& j_;
  std::string prefix_;
};

// Unsigned fields must not silently wrap a negative JSON number.
template <typename T>
void get_count(const Reader& r, const char* key, T& out, const Json& raw) {
  if (raw.is_number_integer() && raw.get<long long>() < 0)
    throw ConfigError("config key '" + r.path(key) + "' must be nonnegative");
  r.get(key, out);
}

inline void reject_unknown(const Json& user, const Json& schema, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError("config section '" + (prefix.empty() ? "<root>" : prefix) + "' must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    auto s = schema.find(it.key());
    if (s == schema.end()) throw ConfigError("unknown config key '" + key + "'");
    if (s->is_object()) reject_unknown(*it, *s, key);
  }
}

inline void merge_into(Json& base, const Json& user) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it->is_object() && base[it.key()].is_object()) {
      merge_into(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
  using detail::opt_json;
  Json j;
  j["problem"] = c.problem;
  j["dataset"] = {{"path", opt_json(c.dataset.path)},
                  {"label_column", c.dataset.label_column},
                  {"standardize", c.dataset.standardize},
                  {"strategic_columns", opt_json(c.dataset.strategic_columns)},
                  {"balance", opt_json(c.dataset.balance)},
                  {"balance_seed", c.dataset.balance_seed},
                  {"synthetic",
                   {{"n", c.dataset.synthetic.n},
                    {"d", c.dataset.synthetic.d},
                    {"noise_std", c.dataset.synthetic.noise_std},
                    {"strategic", c.dataset.synthetic.strategic},
                    {"seed", c.dataset.synthetic.seed}}}};
  j["toy"] = {{"n", c.toy.n}, {"d", c.toy.d}, {"seed", c.toy.seed}};
  j["model"] = {{"zeta", c.model.zeta}, {"mask", opt_json(c.model.mask)}};
  j["objective"] = {{"delta", c.objective.delta},
                    {"kappa", c.objective.kappa},
                    {"alpha_max", opt_json(c.objective.alpha_max)},
                    {"link", c.objective.link}};
  j["solver"] = {{"variant", c.solver.variant},
                 {"epochs", c.solver.epochs},
                 {"eta0", c.solver.eta0},
                 {"eps0", c.solver.eps0},
                 {"chi", c.solver.chi},
                 {"eta_exponent", opt_json(c.solver.eta_exponent)},
                 {"eps_exponent", c.solver.eps_exponent},
                 {"estimator_mode", c.solver.estimator_mode},
                 {"seed", c.solver.seed},
                 {"record_every", c.solver.record_every},
                 {"smoothness", opt_json(c.solver.smoothness)}};
  j["reference"] = {{"enabled", c.reference.enabled},
                    {"tol", c.reference.tol},
                    {"max_iters", c.reference.max_iters},
                    {"method", c.reference.method}};
  j["outputs"] = {{"dir", c.outputs.dir},
                  {"trace_csv", c.outputs.trace_csv},
                  {"plot_svg", opt_json(c.outputs.plot_svg)},
                  {"snapshot_every", c.outputs.snapshot_every},
                  {"wall_time", c.outputs.wall_time}};
  j["compare"] = {{"repeats", c.compare.repeats}};
  j["robustness"] = {{"zetas", c.robustness.zetas},
                     {"classifier", opt_json(c.robustness.classifier)},
                     {"baseline_iterations", c.robustness.baseline_iterations}};
  j["sweep"] = {{"ns", c.sweep.ns}, {"ds", c.sweep.ds}, {"target", c.sweep.target}, {"epoch_cap", c.sweep.epoch_cap}};
  return j;
}

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.problem != "wdrsc" && c.problem != "toy-bilinear") fail("problem must be 'wdrsc' or 'toy-bilinear'");
  if (c.dataset.synthetic.n < 1) fail("dataset.synthetic.n must be at least 1");
  if (c.dataset.synthetic.d < 1) fail("dataset.synthetic.d must be at least 1");
  if (c.dataset.synthetic.strategic > c.dataset.synthetic.d) fail("dataset.synthetic.strategic exceeds d");
  if (!(c.dataset.synthetic.noise_std >= 0.0)) fail("dataset.synthetic.noise_std must be nonnegative");
  if (c.toy.n < 1 || c.toy.d < 2 || c.toy.d % 2 != 0) fail("toy needs n >= 1 and an even d >= 2");
  if (!(c.model.zeta > 0.0)) fail("model.zeta must be positive");
  if (!(c.objective.delta > 0.0)) fail("objective.delta must be positive");
  if (!(c.objective.kappa > 0.0)) fail("objective.kappa must be positive");
  if (c.objective.alpha_max && !(*c.objective.alpha_max > 0.0)) fail("objective.alpha_max must be positive");
  if (c.objective.link != "logistic") fail("objective.link must be 'logistic'");
  if (c.solver.variant != "all") {
    try {
      parse_variant(c.solver.variant);
    } catch (const std::invalid_argument& e) {
      fail(std::string("solver.variant: ") + e.what());
    }
  }
  if (c.solver.epochs < 1) fail("solver.epochs must be at least 1");
  if (c.solver.estimator_mode != "hybrid" && c.solver.estimator_mode != "full_zo")
    fail("solver.estimator_mode must be 'hybrid' or 'full_zo'");
  if (c.solver.smoothness && !(*c.solver.smoothness > 0.0)) fail("solver.smoothness must be positive");
  try {
    c.schedule().validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("solver schedule: ") + e.what());
  }
  if (!(c.reference.tol > 0.0)) fail("reference.tol must be positive");
  if (c.reference.method != "ogda" && c.reference.method != "gda") fail("reference.method must be 'ogda' or 'gda'");
  if (c.outputs.trace_csv.empty()) fail("outputs.trace_csv must not be empty");
  if (c.compare.repeats < 1) fail("compare.repeats must be at least 1");
  if (c.robustness.zetas.empty()) fail("robustness.zetas must not be empty");
  for (double z : c.robustness.zetas)
    if (!(z >= 0.0)) fail("robustness.zetas must be nonnegative");
  if (c.sweep.ns.empty() || c.sweep.ds.empty()) fail("sweep.ns and sweep.ds must not be empty");
  if (!(c.sweep.target > 0.0)) fail("sweep.target must be positive");
  if (c.sweep.epoch_cap < 1) fail("sweep.epoch_cap must be at least 1");
}

/// Reads a complete document (all keys present, as produced by to_json).
inline ExperimentConfig from_full_json(const Json& j) {
  using detail::get_count;
  ExperimentConfig c;
  detail::Reader r(j, "");
  r.get("problem", c.problem);

  const auto ds = r.sub("dataset");
  ds.get("path", c.dataset.path);
  ds.get("label_column", c.dataset.label_column);
  ds.get("standardize", c.dataset.standardize);
  ds.get("strategic_columns", c.dataset.strategic_columns);
  get_count(ds, "balance", c.dataset.balance, j["dataset"]["balance"]);
  get_count(ds, "balance_seed", c.dataset.balance_seed, j["dataset"]["balance_seed"]);
  const auto syn = ds.sub("synthetic");
  const Json& sj = j["dataset"]["synthetic"];
  get_count(syn, "n", c.dataset.synthetic.n, sj["n"]);
  get_count(syn, "d", c.dataset.synthetic.d, sj["d"]);
  syn.get("noise_std", c.dataset.synthetic.noise_std);
  get_count(syn, "strategic", c.dataset.synthetic.strategic, sj["strategic"]);
  get_count(syn, "seed", c.dataset.synthetic.seed, sj["seed"]);

  const auto toy = r.sub("toy");
  get_count(toy, "n", c.toy.n, j["toy"]["n"]);
  get_count(toy, "d", c.toy.d, j["toy"]["d"]);
  get_count(toy, "seed", c.toy.seed, j["toy"]["seed"]);

  const auto model = r.sub("model");
  model.get("zeta", c.model.zeta);
  model.get("mask", c.model.mask);

  const auto obj = r.sub("objective");
  obj.get("delta", c.objective.delta);
  obj.get("kappa", c.objective.kappa);
  obj.get("alpha_max", c.objective.alpha_max);
  obj.get("link", c.objective.link);

  const auto sol = r.sub("solver");
  const Json& so = j["solver"];
  sol.get("variant", c.solver.variant);
  get_count(sol, "epochs", c.solver.epochs, so["epochs"]);
  sol.get("eta0", c.solver.eta0);
  sol.get("eps0", c.solver.eps0);
  sol.get("chi", c.solver.chi);
  sol.get("eta_exponent", c.solver.eta_exponent);
  sol.get("eps_exponent", c.solver.eps_exponent);
  sol.get("estimator_mode", c.solver.estimator_mode);
  get_count(sol, "seed", c.solver.seed, so["seed"]);
  get_count(sol, "record_every", c.solver.record_every, so["record_every"]);
  sol.get("smoothness", c.solver.smoothness);

  const auto ref = r.sub("reference");
  ref.get("enabled", c.reference.enabled);
  ref.get("tol", c.reference.tol);
  get_count(ref, "max_iters", c.reference.max_iters, j["reference"]["max_iters"]);
  ref.get("method", c.reference.method);

  const auto out = r.sub("outputs");
  out.get("dir", c.outputs.dir);
  out.get("trace_csv", c.outputs.trace_csv);
  out.get("plot_svg", c.outputs.plot_svg);
  get_count(out, "snapshot_every", c.outputs.snapshot_every, j["outputs"]["snapshot_every"]);
  out.get("wall_time", c.outputs.wall_time);

  get_count(r.sub("compare"), "repeats", c.compare.repeats, j["compare"]["repeats"]);

  const auto rob = r.sub("robustness");
  rob.get("zetas", c.robustness.zetas);
  rob.get("classifier", c.robustness.classifier);
  get_count(rob, "baseline_iterations", c.robustness.baseline_iterations, j["robustness"]["baseline_iterations"]);

  const auto sw = r.sub("sweep");
  sw.get("ns", c.sweep.ns);
  sw.get("ds", c.sweep.ds);
  sw.get("target", c.sweep.target);
  get_count(sw, "epoch_cap", c.sweep.epoch_cap, j["sweep"]["epoch_cap"]);

  validate(c);
  return c;
}

/// Overlays a user document on the defaults. Unknown keys are an error.
inline ExperimentConfig parse_config(const Json& user) {
  Json base = to_json(ExperimentConfig{});
  detail::reject_unknown(user, base, "");
  detail::merge_into(base, user);
  return from_full_json(base);
}

/// Canonical form: sorted keys, compact, so equal configs hash equally.
inline std::string canonical_dump(const ExperimentConfig& c) { return to_json(c).dump(); }

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_dump(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

/// Sets `dotted.path` in a user document. The value is read as JSON when it
/// parses (numbers, booleans, null, arrays), else as a bare string.
inline void apply_override(Json& user, const std::string& dotted, const std::string& value) {
  if (dotted.empty()) throw ConfigError("empty override key");
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::exception&) {
    parsed = value;
  }
  Json* node = &user;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("malformed override key '" + dotted + "'");
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    Json& next = (*node)[key];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) throw ConfigError("override '" + dotted + "' descends into a non-object");
    node = &next;
    start = dot + 1;
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Config file (optional) plus dotted overrides applied in order.
inline ExperimentConfig load_config(const std::optional<std::string>& path,
                                    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  Json user = path ? read_json_file(*path) : Json::object();
  for (const auto& [k, v] : overrides) apply_override(user, k, v);
  return parse_config(user);
}

}  // namespace zominmax
