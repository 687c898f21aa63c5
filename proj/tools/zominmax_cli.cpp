// zominmax command-line tool.
//
//   zominmax gen-data --n 500 --d 10 --seed 7 --out data/
//   zominmax solve --config run.json --solver.eta0 0.05
//   zominmax compare --config run.json --repeats 10
//   zominmax robustness --config run.json
//   zominmax sweep --config run.json
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
// 4 I/O or data error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "zominmax/experiment.hpp"

namespace {

using namespace zominmax;

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;
constexpr int kIo = 4;

/// Turns leftover `--a.b value` / `--a.b=value` arguments into overrides.
std::vector<std::pair<std::string, std::string>> dotted_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t k = 0; k < extras.size(); ++k) {
    const std::string& arg = extras[k];
    if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (k + 1 >= extras.size()) throw ConfigError("override '" + arg + "' has no value");
      value = extras[++k];
    }
    if (key.find('.') == std::string::npos) throw ConfigError("unknown option '--" + key + "'");
    out.emplace_back(key, value);
  }
  return out;
}

struct CommonArgs {
  std::optional<std::string> config;
  std::optional<std::string> problem;
  std::optional<std::string> reference_method;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "experiment config (JSON)");
  cmd->add_option("--problem", args.problem, "wdrsc or toy-bilinear");
  cmd->add_option("--reference-method", args.reference_method, "ogda or gda");
  cmd->add_option("--out", args.out, "output directory (outputs.dir)");
  cmd->allow_extras();
}

ExperimentConfig resolve(const CLI::App* cmd, const CommonArgs& args,
                         std::vector<std::pair<std::string, std::string>> extra = {}) {
  auto overrides = dotted_overrides(cmd->remaining());
  if (args.problem) overrides.emplace_back("problem", *args.problem);
  if (args.reference_method) overrides.emplace_back("reference.method", *args.reference_method);
  if (args.out) overrides.emplace_back("outputs.dir", *args.out);
  for (auto& e : extra) overrides.push_back(std::move(e));
  return load_config(args.config, overrides);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Zeroth-order min-max solvers and robust strategic classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", toolkit_version());

  SyntheticSpec spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic strategic-classification dataset");
  gen->add_option("--n", spec.n, "examples")->capture_default_str();
  gen->add_option("--d", spec.d, "features")->capture_default_str();
  gen->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  gen->add_option("--noise-std", spec.noise_std, "label noise standard deviation")->capture_default_str();
  gen->add_option("--strategic", spec.strategic, "number of strategic (leading) features")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();

  CommonArgs solve_args, compare_args, rob_args, sweep_args;
  auto* solve = app.add_subcommand("solve", "run one solver variant (or all four)");
  add_common(solve, solve_args);
  auto* compare = app.add_subcommand("compare", "run all four variants against a shared reference saddle");
  add_common(compare, compare_args);
  std::optional<std::size_t> repeats;
  compare->add_option("--repeats", repeats, "seeds per variant; >1 also writes mean/std bands");
  auto* robustness = app.add_subcommand("robustness", "accuracy of WDRSC vs. strategic logistic regression over zeta");
  add_common(robustness, rob_args);
  auto* sweep = app.add_subcommand("sweep", "queries needed to reach the target gap over an (n, d) grid");
  add_common(sweep, sweep_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (gen->parsed()) {
    const auto r = cmd_gen_data(spec, gen_out);
    std::cout << "wrote " << r.data.string() << " and " << r.theta_star.string() << '\n';
  } else if (solve->parsed()) {
    const auto cfg = resolve(solve, solve_args);
    const auto r = cmd_solve(cfg);
    print_warnings(r.warnings);
    for (const auto& v : r.runs) {
      std::cout << to_string(v.variant) << ": " << v.result.epochs_run << " epochs, " << v.result.queries << " queries";
      if (v.final_gap) std::cout << ", final gap " << *v.final_gap;
      std::cout << " -> " << v.trace_path.string() << '\n';
      print_warnings(v.result.warnings);
    }
  } else if (compare->parsed()) {
    std::vector<std::pair<std::string, std::string>> extra;
    if (repeats) extra.emplace_back("compare.repeats", std::to_string(*repeats));
    const auto cfg = resolve(compare, compare_args, extra);
    const auto r = cmd_compare(cfg);
    print_warnings(r.warnings);
    if (r.reference)
      for (Variant v : kAllVariants)
        std::cout << to_string(v) << ": mean final gap " << r.mean_final_gap(v) << '\n';
  } else if (robustness->parsed()) {
    const auto cfg = resolve(robustness, rob_args);
    const auto r = cmd_robustness(cfg);
    std::cout << "classifier,zeta,sign_accuracy\n";
    for (const auto& row : r.rows) std::cout << row.classifier << ',' << row.zeta << ',' << row.sign_accuracy << '\n';
  } else if (sweep->parsed()) {
    const auto cfg = resolve(sweep, sweep_args);
    for (const auto& c : cmd_sweep(cfg))
      std::cout << "n=" << c.n << " d=" << c.d << ": " << (c.reached ? std::to_string(c.queries) + " queries" : "cap")
                << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const NonConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
