#pragma once

// Experiment runner behind the command-line tool: builds problems from an
// ExperimentConfig, runs solvers, and writes traces, curves, charts and
// manifests. Every file is written atomically (temp file, then rename) and is
// accompanied by `<file>.manifest.json`.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "zominmax/config.hpp"
#include "zominmax/data.hpp"
#include "zominmax/errors.hpp"
#include "zominmax/metrics.hpp"
#include "zominmax/solvers.hpp"
#include "zominmax/svg.hpp"
#include "zominmax/toy.hpp"
#include "zominmax/wdrsc.hpp"

#ifndef ZOMINMAX_VERSION
#define ZOMINMAX_VERSION "0.0.0"
#endif

namespace zominmax {

namespace fs = std::filesystem;

inline std::string toolkit_version() { return ZOMINMAX_VERSION; }

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

/// Writes to a sibling temp file and renames it into place.
inline void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = toolkit_version();
  std::string started;
  std::string finished;
  std::optional<double> final_gap;
  std::optional<std::uint64_t> final_queries;
  std::vector<std::string> warnings;
};

inline Json to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["final_gap"] = m.final_gap ? Json(*m.final_gap) : Json(nullptr);
  j["final_queries"] = m.final_queries ? Json(*m.final_queries) : Json(nullptr);
  j["warnings"] = m.warnings;
  return j;
}

inline fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

/// Output plus its manifest.
inline void write_output(const fs::path& path, const std::string& content, RunManifest manifest) {
  write_atomic(path, content);
  manifest.finished = utc_timestamp();
  Json j = to_json(manifest);
  j["output"] = path.filename().string();
  write_atomic(manifest_path(path), j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Worker pool

/// Worker threads for independent runs: hardware concurrency, capped by
/// ZO_MINMAX_THREADS when set to a positive integer.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ZO_MINMAX_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs fn(k) for k in [0, count) on worker threads. Results go into
/// caller-owned slots indexed by k, so output order never depends on scheduling.
/// The first exception (by index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  if (count == 0) return;
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Problems

struct Problem {
  std::shared_ptr<const FiniteSumOracle> exact;   // all blocks analytic (reference, smoothness)
  std::shared_ptr<const FiniteSumOracle> solver;  // what the zeroth-order solver sees
  FeasibleSet set;
  std::shared_ptr<const WdrscObjective> wdrsc;    // null for the toy problem
};

inline StrategicDataset load_dataset(const ExperimentConfig& cfg) {
  StrategicDataset ds;
  if (cfg.dataset.path) {
    CsvSchema schema;
    schema.label_column = cfg.dataset.label_column;
    schema.standardize = cfg.dataset.standardize;
    schema.strategic_columns = cfg.dataset.strategic_columns;
    ds = load_csv(*cfg.dataset.path, schema);
  } else {
    const auto& s = cfg.dataset.synthetic;
    ds = generate_synthetic({s.n, s.d, s.noise_std, s.strategic, s.seed}).dataset;
  }
  if (cfg.dataset.balance) {
    SeededRng rng(cfg.dataset.balance_seed);
    ds = balance(ds, *cfg.dataset.balance, rng);
  }
  if (cfg.model.mask) {
    ds.strategic_mask.assign(ds.d(), false);
    for (std::size_t j : *cfg.model.mask) {
      if (j >= ds.d()) throw ConfigError("model.mask index " + std::to_string(j) + " is out of range");
      ds.strategic_mask[j] = true;
    }
  }
  return ds;
}

inline double alpha_cap(const ExperimentConfig& cfg, const GlmLink& link) {
  return cfg.objective.alpha_max ? *cfg.objective.alpha_max : default_alpha_max(link);
}

inline Problem build_wdrsc(const ExperimentConfig& cfg, std::shared_ptr<const StrategicDataset> ds) {
  const GlmLink link = GlmLink::by_name(cfg.objective.link);
  WdrscParams p{cfg.objective.delta, cfg.objective.kappa, alpha_cap(cfg, link)};
  auto exact = std::make_shared<const WdrscObjective>(
      build_objective(ds, BestResponseModel::quadratic(cfg.model.zeta, ds->strategic_mask), link, p));
  // The solver reaches theta only through the response model.
  auto blind = std::make_shared<const WdrscObjective>(exact->with_exact_theta(false));
  return {exact, blind, exact->constraint_set(), exact};
}

inline Problem build_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == "toy-bilinear") {
    auto toy = make_toy_bilinear(cfg.toy.n, cfg.toy.d, cfg.toy.seed);
    return {toy.oracle, toy.oracle, toy.set, nullptr};
  }
  return build_wdrsc(cfg, std::make_shared<const StrategicDataset>(load_dataset(cfg)));
}

struct Reference {
  Vector point;
  double residual;
  std::size_t iterations;
};

inline std::optional<Reference> compute_reference(const ExperimentConfig& cfg, const Problem& problem,
                                                  std::vector<std::string>& warnings) {
  if (!cfg.reference.enabled) return std::nullopt;
  const auto r = reference_saddle(*problem.exact, problem.set, cfg.reference_options());
  if (problem.wdrsc && problem.wdrsc->alpha(r.point) >= problem.wdrsc->params().alpha_max * (1.0 - 1e-6))
    warnings.push_back("reference saddle sits on the alpha cap; consider raising objective.alpha_max");
  return Reference{r.point, r.residual, r.iterations};
}

inline SolverConfig solver_config(const ExperimentConfig& cfg, Variant v, std::uint64_t seed) {
  SolverConfig s;
  s.variant = v;
  s.epochs = cfg.solver.epochs;
  s.schedule = cfg.schedule();
  s.mode = cfg.mode();
  s.seed = seed;
  s.record_every = cfg.solver.record_every;
  s.snapshot_every = cfg.outputs.snapshot_every;
  s.smoothness = cfg.solver.smoothness;
  return s;
}

inline RunHooks gap_hooks(const Problem& problem, const std::optional<Reference>& ref) {
  RunHooks h;
  if (ref) {
    const auto oracle = problem.exact;
    const auto set = problem.set;
    const Vector star = ref->point;
    h.suboptimality = [oracle, set, star](const Vector& u) { return gap(*oracle, set, star, u).value; };
  }
  return h;
}

inline std::string trace_text(const Trace& trace, bool with_timing) {
  std::ostringstream os;
  trace.write_csv(os, with_timing);
  return os.str();
}

inline std::string vector_csv(const Vector& v, const std::string& header) {
  std::ostringstream os;
  os << header << '\n' << std::setprecision(17);
  for (Eigen::Index k = 0; k < v.size(); ++k) os << v[k] << '\n';
  return os.str();
}

inline Vector read_vector_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> vals;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto v = detail::parse_real(line);
    if (!v) throw DataError(path.string() + ": row " + std::to_string(row) + " is not a real number");
    vals.push_back(*v);
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

/// `trace.csv` -> `trace_ogda_rr.csv`.
inline std::string suffixed(const std::string& name, const std::string& suffix) {
  const fs::path p(name);
  return (p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string())).string();
}

inline std::string variant_label(Variant v) {
  switch (v) {
    case Variant::ogda_rr: return "A-I (OGDA-RR)";
    case Variant::ogda_wr: return "A-II (OGDA-WR)";
    case Variant::sgda_rr: return "A-III (SGDA-RR)";
    case Variant::sgda_wr: return "A-IV (SGDA-WR)";
  }
  return "?";
}

inline svg::Series trace_series(const std::string& name, const Trace& trace) {
  svg::Series s{name, {}, {}, {}, {}};
  for (const auto& r : trace.records) {
    if (!r.suboptimality) continue;
    s.x.push_back(static_cast<double>(r.epoch));
    s.y.push_back(*r.suboptimality);
  }
  return s;
}

inline RunManifest base_manifest(const std::string& command, const ExperimentConfig& cfg, const std::string& started) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.solver.seed;
  m.started = started;
  return m;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataResult {
  fs::path data;
  fs::path theta_star;
};

inline GenDataResult cmd_gen_data(const SyntheticSpec& spec, const fs::path& out_dir) {
  spec.validate();
  const std::string started = utc_timestamp();
  const auto syn = generate_synthetic(spec);
  ExperimentConfig cfg;
  cfg.dataset.synthetic = {spec.n, spec.d, spec.noise_std, spec.strategic, spec.seed};
  RunManifest m = base_manifest("gen-data", cfg, started);
  m.seed = spec.seed;

  std::ostringstream data;
  write_csv(syn.dataset, data);
  GenDataResult r{out_dir / "data.csv", out_dir / "theta_star.csv"};
  write_output(r.data, data.str(), m);
  write_output(r.theta_star, vector_csv(syn.theta_star, "theta_star"), m);
  return r;
}

// ---------------------------------------------------------------------------
// solve

struct VariantRun {
  Variant variant;
  RunResult result;
  std::optional<double> final_gap;
  fs::path trace_path;
};

struct SolveResult {
  std::optional<Reference> reference;
  std::vector<VariantRun> runs;
  std::vector<std::string> warnings;
};

inline void check_step_size(const ExperimentConfig& cfg, const Problem& problem, std::vector<std::string>& warnings) {
  double ell = 0.0;
  if (cfg.solver.smoothness) {
    ell = *cfg.solver.smoothness;
  } else {
    SeededRng rng(cfg.solver.seed ^ 0x5eedULL);
    ell = estimate_smoothness(*problem.exact, problem.set, rng);
  }
  if (ell > 0.0 && cfg.solver.eta0 >= 0.5 / ell) {
    std::ostringstream ss;
    ss << "eta0 = " << cfg.solver.eta0 << " is not below 1/(2 l) = " << 0.5 / ell << " for estimated smoothness l = " << ell;
    warnings.push_back(ss.str());
  }
}

inline SolveResult cmd_solve(const ExperimentConfig& cfg) {
  const std::string started = utc_timestamp();
  const Problem problem = build_problem(cfg);
  SolveResult out;
  check_step_size(cfg, problem, out.warnings);
  out.reference = compute_reference(cfg, problem, out.warnings);
  const RunHooks hooks = gap_hooks(problem, out.reference);
  const fs::path dir(cfg.outputs.dir);
  const auto variants = cfg.variants();
  const bool fan_out = variants.size() > 1;

  out.runs.resize(variants.size());
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const Variant v = variants[k];
    auto& run_k = out.runs[k];
    run_k.variant = v;
    run_k.trace_path = dir / (fan_out ? suffixed(cfg.outputs.trace_csv, to_string(v)) : cfg.outputs.trace_csv);
    RunManifest m = base_manifest("solve", cfg, started);
    try {
      run_k.result = run(solver_config(cfg, v, cfg.solver.seed), *problem.solver, problem.set, std::nullopt, hooks);
    } catch (const RunFailure& e) {
      // Flush what was recorded before the failure, then report it.
      m.warnings.push_back(std::string("run aborted: ") + e.what());
      if (!e.trace.records.empty()) {
        m.final_queries = e.trace.records.back().queries;
        m.final_gap = e.trace.records.back().suboptimality;
      }
      write_output(run_k.trace_path, trace_text(e.trace, cfg.outputs.wall_time), m);
      throw;
    }
    const auto& res = run_k.result;
    if (!res.trace.records.empty()) run_k.final_gap = res.trace.records.back().suboptimality;
    m.final_gap = run_k.final_gap;
    m.final_queries = res.queries;
    m.warnings = out.warnings;
    m.warnings.insert(m.warnings.end(), res.warnings.begin(), res.warnings.end());
    write_output(run_k.trace_path, trace_text(res.trace, cfg.outputs.wall_time), m);

    if (problem.wdrsc) {
      const std::string name = fan_out ? suffixed("theta.csv", to_string(v)) : "theta.csv";
      write_output(dir / name, vector_csv(problem.wdrsc->theta(res.average), "theta"), m);
    }
    if (!res.trace.snapshots.empty()) {
      std::ostringstream snap;
      snap << "epoch";
      for (std::size_t j = 0; j < problem.set.dim(); ++j) snap << ",u" << j;
      snap << '\n' << std::setprecision(17);
      for (const auto& s : res.trace.snapshots) {
        snap << s.epoch;
        for (Eigen::Index j = 0; j < s.average.size(); ++j) snap << ',' << s.average[j];
        snap << '\n';
      }
      const std::string name = fan_out ? suffixed("snapshots.csv", to_string(v)) : "snapshots.csv";
      write_output(dir / name, snap.str(), m);
    }
  }

  if (cfg.outputs.plot_svg) {
    svg::LineChart chart{"Suboptimality of the averaged iterate", "epoch", "gap", true, {}};
    for (const auto& r : out.runs) chart.series.push_back(trace_series(variant_label(r.variant), r.result.trace));
    RunManifest m = base_manifest("solve", cfg, started);
    m.warnings = out.warnings;
    if (!out.runs.empty()) {
      m.final_gap = out.runs.front().final_gap;
      m.final_queries = out.runs.front().result.queries;
    }
    write_output(dir / *cfg.outputs.plot_svg, svg::render(chart), m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// compare

struct BandRow {
  std::size_t epoch;
  Variant variant;
  double mean;
  double std;  // sample standard deviation over repeats
};

struct CompareResult {
  std::optional<Reference> reference;
  std::size_t repeats = 1;
  // runs[v * repeats + r]: variant kAllVariants[v], solver seed base + r
  std::vector<RunResult> runs;
  std::vector<BandRow> bands;
  std::vector<std::string> warnings;

  /// Mean over repeats of the last recorded gap.
  double mean_final_gap(Variant v) const {
    const auto vi = static_cast<std::size_t>(v);
    double sum = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto& rec = runs[vi * repeats + r].trace.records;
      if (rec.empty() || !rec.back().suboptimality) return std::nan("");
      sum += *rec.back().suboptimality;
    }
    return sum / static_cast<double>(repeats);
  }
};

inline std::vector<BandRow> aggregate_bands(const std::vector<RunResult>& runs, std::size_t repeats) {
  std::vector<BandRow> rows;
  for (std::size_t v = 0; v < 4; ++v) {
    const auto& first = runs[v * repeats].trace.records;
    for (std::size_t k = 0; k < first.size(); ++k) {
      std::vector<double> vals;
      for (std::size_t r = 0; r < repeats; ++r) {
        const auto& rec = runs[v * repeats + r].trace.records;
        if (k < rec.size() && rec[k].suboptimality) vals.push_back(*rec[k].suboptimality);
      }
      if (vals.empty()) continue;
      double mean = 0.0;
      for (double x : vals) mean += x;
      mean /= static_cast<double>(vals.size());
      double ss = 0.0;
      for (double x : vals) ss += (x - mean) * (x - mean);
      const double sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
      rows.push_back({first[k].epoch, kAllVariants[v], mean, sd});
    }
  }
  return rows;
}

inline CompareResult cmd_compare(const ExperimentConfig& cfg) {
  const std::string started = utc_timestamp();
  const Problem problem = build_problem(cfg);
  CompareResult out;
  out.repeats = cfg.compare.repeats;
  out.reference = compute_reference(cfg, problem, out.warnings);
  const RunHooks hooks = gap_hooks(problem, out.reference);

  const std::size_t jobs = 4 * out.repeats;
  out.runs.resize(jobs);
  parallel_for(jobs, [&](std::size_t k) {
    const Variant v = kAllVariants[k / out.repeats];
    const std::uint64_t seed = cfg.solver.seed + k % out.repeats;
    out.runs[k] = run(solver_config(cfg, v, seed), *problem.solver, problem.set, std::nullopt, hooks);
  });

  const fs::path dir(cfg.outputs.dir);
  RunManifest m = base_manifest("compare", cfg, started);
  m.warnings = out.warnings;
  m.final_gap = out.reference ? std::optional<double>(out.mean_final_gap(Variant::ogda_rr)) : std::nullopt;
  m.final_queries = out.runs.front().queries;

  std::ostringstream combined;
  combined << "variant,seed," << Trace::kHeader << '\n';
  for (std::size_t k = 0; k < jobs; ++k) {
    const Variant v = kAllVariants[k / out.repeats];
    const std::uint64_t seed = cfg.solver.seed + k % out.repeats;
    std::istringstream lines(trace_text(out.runs[k].trace, cfg.outputs.wall_time));
    std::string line;
    std::getline(lines, line);  // per-run header
    while (std::getline(lines, line)) combined << to_string(v) << ',' << seed << ',' << line << '\n';
  }
  write_output(dir / "compare.csv", combined.str(), m);

  svg::LineChart chart{"Suboptimality by algorithm", "epoch", "gap", true, {}};
  if (out.reference && out.repeats > 1) {
    out.bands = aggregate_bands(out.runs, out.repeats);
    std::ostringstream bands;
    bands << "epoch,variant,mean,std\n" << std::setprecision(17);
    for (const auto& b : out.bands) bands << b.epoch << ',' << to_string(b.variant) << ',' << b.mean << ',' << b.std << '\n';
    write_output(dir / "bands.csv", bands.str(), m);
    for (std::size_t v = 0; v < 4; ++v) {
      svg::Series s{variant_label(kAllVariants[v]), {}, {}, {}, {}};
      for (const auto& b : out.bands) {
        if (b.variant != kAllVariants[v]) continue;
        s.x.push_back(static_cast<double>(b.epoch));
        s.y.push_back(b.mean);
        s.lo.push_back(b.mean - 2.0 * b.std);
        s.hi.push_back(b.mean + 2.0 * b.std);
      }
      chart.series.push_back(std::move(s));
    }
  } else {
    for (std::size_t v = 0; v < 4; ++v)
      chart.series.push_back(trace_series(variant_label(kAllVariants[v]), out.runs[v * out.repeats].trace));
  }
  write_output(dir / "compare.svg", svg::render(chart), m);
  return out;
}

// ---------------------------------------------------------------------------
// robustness

struct RobustnessResult {
  Vector wdrsc_theta;
  Vector baseline_theta;
  std::vector<CurveRow> rows;
};

inline std::string curve_text(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os << "classifier,zeta,margin_accuracy,sign_accuracy\n" << std::setprecision(17);
  for (const auto& r : rows) os << r.classifier << ',' << r.zeta << ',' << r.margin_accuracy << ',' << r.sign_accuracy << '\n';
  return os.str();
}

inline RobustnessResult cmd_robustness(const ExperimentConfig& cfg) {
  if (cfg.problem != "wdrsc") throw ConfigError("robustness needs problem 'wdrsc'");
  const std::string started = utc_timestamp();
  const fs::path dir(cfg.outputs.dir);
  const fs::path classifier = cfg.robustness.classifier ? fs::path(*cfg.robustness.classifier) : dir / "theta.csv";
  if (!fs::exists(classifier))
    throw DataError("WDRSC classifier '" + classifier.string() + "' not found: run the solve stage first");

  const StrategicDataset ds = load_dataset(cfg);
  RobustnessResult out;
  out.wdrsc_theta = read_vector_csv(classifier);
  if (static_cast<std::size_t>(out.wdrsc_theta.size()) != ds.d())
    throw DataError("classifier '" + classifier.string() + "' has " + std::to_string(out.wdrsc_theta.size()) +
                    " coefficients, dataset has " + std::to_string(ds.d()) + " features");
  BaselineOptions bo;
  bo.iterations = cfg.robustness.baseline_iterations;
  out.baseline_theta = train_strategic_logistic(ds, cfg.model.zeta, ds.strategic_mask, GlmLink::by_name(cfg.objective.link), bo);
  out.rows = robustness_curve(ds, {{"wdrsc", out.wdrsc_theta}, {"logreg_sc", out.baseline_theta}},
                              cfg.robustness.zetas, ds.strategic_mask);

  RunManifest m = base_manifest("robustness", cfg, started);
  write_output(dir / "curve.csv", curve_text(out.rows), m);
  write_output(dir / "baseline_theta.csv", vector_csv(out.baseline_theta, "theta"), m);

  svg::LineChart chart{"Accuracy under strategic perturbation", "zeta", "sign accuracy", false, {}};
  for (const char* name : {"wdrsc", "logreg_sc"}) {
    svg::Series s{std::string(name) == "wdrsc" ? "WDRSC" : "LogReg SC", {}, {}, {}, {}};
    for (const auto& r : out.rows) {
      if (r.classifier != name) continue;
      s.x.push_back(r.zeta);
      s.y.push_back(r.sign_accuracy);
    }
    chart.series.push_back(std::move(s));
  }
  write_output(dir / "robustness.svg", svg::render(chart), m);
  return out;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCell {
  std::size_t n;
  std::size_t d;
  std::size_t epochs;
  std::uint64_t queries;
  bool reached;
  double final_gap;
};

/// Strategic count for a sweep cell: the configured fraction of d, rounded up.
inline std::size_t sweep_strategic(const ExperimentConfig& cfg, std::size_t d) {
  const auto& s = cfg.dataset.synthetic;
  return std::min(d, (d * s.strategic + s.d - 1) / s.d);
}

inline std::vector<SweepCell> cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.problem != "wdrsc") throw ConfigError("sweep needs problem 'wdrsc'");
  if (cfg.dataset.path) throw ConfigError("sweep generates synthetic data; unset dataset.path");
  const std::string started = utc_timestamp();
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t d : cfg.sweep.ds)
    for (std::size_t n : cfg.sweep.ns) grid.emplace_back(n, d);

  std::vector<SweepCell> cells(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    ExperimentConfig c = cfg;
    c.dataset.synthetic.n = grid[k].first;
    c.dataset.synthetic.d = grid[k].second;
    c.dataset.synthetic.strategic = sweep_strategic(cfg, grid[k].second);
    c.model.mask.reset();
    c.reference.enabled = true;
    c.solver.epochs = cfg.sweep.epoch_cap;
    const Problem problem = build_problem(c);
    std::vector<std::string> ignored;
    const auto ref = compute_reference(c, problem, ignored);
    RunHooks hooks = gap_hooks(problem, ref);
    const double target = cfg.sweep.target;
    hooks.stop = [target](const TraceRecord& r) { return r.suboptimality && *r.suboptimality <= target; };
    SolverConfig sc = solver_config(c, Variant::ogda_rr, c.solver.seed);
    sc.record_every = 1;
    sc.snapshot_every = 0;
    const auto res = run(sc, *problem.solver, problem.set, std::nullopt, hooks);
    const double last = *res.trace.records.back().suboptimality;
    cells[k] = {grid[k].first, grid[k].second, res.epochs_run, res.queries, last <= target, last};
  });

  std::ostringstream csv;
  csv << "n,d,epochs,queries,status,final_gap\n" << std::setprecision(17);
  svg::BarChart chart{"Queries to reach the target gap", "component evaluations", {}};
  for (const auto& c : cells) {
    csv << c.n << ',' << c.d << ',' << c.epochs << ',' << c.queries << ',' << (c.reached ? "reached" : "cap") << ','
        << c.final_gap << '\n';
    chart.bars.push_back({"n=" + std::to_string(c.n) + " d=" + std::to_string(c.d), static_cast<double>(c.queries), !c.reached});
  }
  RunManifest m = base_manifest("sweep", cfg, started);
  const fs::path dir(cfg.outputs.dir);
  write_output(dir / "sweep.csv", csv.str(), m);
  write_output(dir / "sweep.svg", svg::render(chart), m);
  return cells;
}

}  // namespace zominmax
