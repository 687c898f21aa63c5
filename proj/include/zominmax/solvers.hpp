#pragma once

// Zeroth-order saddle-point solvers:
//   OGDA-RR  optimistic descent-ascent, reshuffled component order
//   OGDA-WR  optimistic descent-ascent, components drawn with replacement
//   SGDA-RR  plain descent-ascent, reshuffled
//   SGDA-WR  plain descent-ascent, with replacement
// plus a deterministic full-batch reference solver for ground-truth saddles.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zominmax/errors.hpp"
#include "zominmax/geometry.hpp"
#include "zominmax/oracle.hpp"
#include "zominmax/random.hpp"

namespace zominmax {

enum class Variant { ogda_rr, ogda_wr, sgda_rr, sgda_wr };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::ogda_rr: return "ogda_rr";
    case Variant::ogda_wr: return "ogda_wr";
    case Variant::sgda_rr: return "sgda_rr";
    case Variant::sgda_wr: return "sgda_wr";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "ogda_rr" || s == "A-I") return Variant::ogda_rr;
  if (s == "ogda_wr" || s == "A-II") return Variant::ogda_wr;
  if (s == "sgda_rr" || s == "A-III") return Variant::sgda_rr;
  if (s == "sgda_wr" || s == "A-IV") return Variant::sgda_wr;
  throw std::invalid_argument("unknown solver variant '" + s + "'");
}

inline constexpr Variant kAllVariants[] = {Variant::ogda_rr, Variant::ogda_wr, Variant::sgda_rr,
                                           Variant::sgda_wr};

inline bool is_optimistic(Variant v) { return v == Variant::ogda_rr || v == Variant::ogda_wr; }
inline bool is_reshuffled(Variant v) { return v == Variant::ogda_rr || v == Variant::sgda_rr; }

/// eta_t = eta0 (t+1)^-eta_exponent, eps_t = eps0 (t+1)^-eps_exponent.
struct Schedule {
  double eta0 = 0.05;
  double eps0 = 1.0;
  double chi = 0.1;
  std::optional<double> eta_exponent;  // defaults to 3/4 + chi
  double eps_exponent = 0.25;

  double eta_power() const { return eta_exponent.value_or(0.75 + chi); }
  double eta(std::size_t t) const { return eta0 * std::pow(static_cast<double>(t + 1), -eta_power()); }
  double eps(std::size_t t) const { return eps0 * std::pow(static_cast<double>(t + 1), -eps_exponent); }

  void validate() const {
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw std::invalid_argument("schedule: eta0 must be positive");
    if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw std::invalid_argument("schedule: eps0 must be positive");
    if (!(chi > 0.0 && chi < 0.25)) throw std::invalid_argument("schedule: chi must lie in (0, 1/4)");
    if (eta_power() < 0.0) throw std::invalid_argument("schedule: eta exponent must be nonnegative");
    if (eps_exponent < 0.0) throw std::invalid_argument("schedule: eps exponent must be nonnegative");
  }
};

/// Running step-size-weighted average of iterates.
class WeightedAverage {
 public:
  WeightedAverage() = default;
  explicit WeightedAverage(std::size_t dim) : sum_(Vector::Zero(static_cast<Eigen::Index>(dim))) {}

  void add(const Vector& u, double weight) {
    if (sum_.size() == 0) sum_ = Vector::Zero(u.size());
    sum_ += weight * u;
    weight_ += weight;
  }

  double weight() const { return weight_; }
  bool empty() const { return weight_ <= 0.0; }
  Vector value() const {
    if (empty()) throw std::logic_error("weighted average of no points");
    return sum_ / weight_;
  }

 private:
  Vector sum_;
  double weight_ = 0.0;
};

struct TraceRecord {
  std::size_t epoch;  // completed epochs
  std::uint64_t queries;
  std::optional<double> suboptimality;
  double wall_time_ms;
};

struct Snapshot {
  std::size_t epoch;
  Vector average;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<Snapshot> snapshots;

  static constexpr const char* kHeader = "epoch,queries,suboptimality,wall_time_ms";

  /// Timing is left blank unless requested so that reruns are byte-identical.
  void write_csv(std::ostream& os, bool with_timing = false) const {
    os << kHeader << '\n';
    for (const auto& r : records) {
      os << r.epoch << ',' << r.queries << ',';
      if (r.suboptimality) os << format_real(*r.suboptimality);
      os << ',';
      if (with_timing) os << format_real(r.wall_time_ms);
      os << '\n';
    }
  }

  static std::string format_real(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
  }
};

/// Carry-over between inner steps and across epoch boundaries.
struct SolverState {
  Vector u;       // current iterate u_i
  Vector u_prev;  // u_{i-1}
  std::size_t prev_index = 0;
  Vector prev_direction;
  Vector lagged;  // estimate at (u_{i-1}, component prev_index, prev_direction)
  double lagged_eps = 0.0;
  bool warm = false;  // false until the first inner step has run
  WeightedAverage average;

  explicit SolverState(Vector start) : u(std::move(start)), u_prev(u), average(static_cast<std::size_t>(u.size())) {}
};

namespace detail {

enum class Sampling { reshuffle, replacement };

class IndexStream {
 public:
  IndexStream(Sampling s, std::size_t n, SeededRng& rng) : sampling_(s), n_(n), rng_(&rng) {
    if (s == Sampling::reshuffle) perm_ = rng.permutation(n);
  }
  std::size_t at(std::size_t step) {
    return sampling_ == Sampling::reshuffle ? perm_[step] : rng_->index(n_);
  }

 private:
  Sampling sampling_;
  std::size_t n_;
  SeededRng* rng_;
  std::vector<std::size_t> perm_;
};

inline Vector checked_step(const FeasibleSet& set, const Vector& u, double eta, const Vector& direction,
                           std::size_t t, std::size_t step) {
  Vector next = project(set, u - eta * direction);
  if (!next.allFinite()) throw NumericalFailure("iterate is not finite", t, step);
  return next;
}

template <typename Fn>
auto with_location(std::size_t t, std::size_t step, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(e.what(), t, step);
  }
}

inline void optimistic_epoch(SolverState& s, Estimator& est, const FeasibleSet& set, const Schedule& sched,
                             std::size_t t, SeededRng& rng, Sampling sampling) {
  const std::size_t n = est.oracle().size();
  const double eta = sched.eta(t);
  const double eps = sched.eps(t);
  IndexStream indices(sampling, n, rng);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = indices.at(k);
    const Vector v = est.draw_direction(rng);
    Vector step;
    Vector current = with_location(t, k, [&] { return est.estimate(j, s.u, eps, v); });
    if (!s.warm) {
      // Cold start: u_{-1} = u_0, same index and direction, so the
      // optimistic correction cancels and this is a plain step.
      step = current;
    } else {
      if (s.lagged_eps != eps) {
        // First step of a new epoch: refresh the lagged estimate at this epoch's radius.
        s.lagged = with_location(t, k, [&] { return est.estimate(s.prev_index, s.u_prev, eps, s.prev_direction); });
        s.lagged_eps = eps;
      }
      Vector cross = with_location(t, k, [&] { return est.estimate(s.prev_index, s.u, eps, v); });
      step = current + cross - s.lagged;
    }
    Vector next = checked_step(set, s.u, eta, step, t, k);
    s.u_prev = std::move(s.u);
    s.u = std::move(next);
    s.prev_index = j;
    s.prev_direction = v;
    s.lagged = std::move(current);
    s.lagged_eps = eps;
    s.warm = true;
    s.average.add(s.u, eta);
  }
  // Force the boundary refresh even if the radius schedule is flat.
  s.lagged_eps = -1.0;
}

inline void plain_epoch(SolverState& s, Estimator& est, const FeasibleSet& set, const Schedule& sched,
                        std::size_t t, SeededRng& rng, Sampling sampling) {
  const std::size_t n = est.oracle().size();
  const double eta = sched.eta(t);
  const double eps = sched.eps(t);
  IndexStream indices(sampling, n, rng);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = indices.at(k);
    const Vector v = est.draw_direction(rng);
    const Vector g = with_location(t, k, [&] { return est.estimate(j, s.u, eps, v); });
    Vector next = checked_step(set, s.u, eta, g, t, k);
    s.u_prev = std::move(s.u);
    s.u = std::move(next);
    s.prev_index = j;
    s.prev_direction = v;
    s.warm = true;
    s.average.add(s.u, eta);
  }
}

}  // namespace detail

inline std::vector<std::size_t> permute(SeededRng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("permute: n must be at least 1");
  return rng.permutation(n);
}

inline void ogda_rr_epoch(SolverState& s, Estimator& est, const FeasibleSet& set, const Schedule& sched,
                          std::size_t t, SeededRng& rng) {
  detail::optimistic_epoch(s, est, set, sched, t, rng, detail::Sampling::reshuffle);
}

inline void ogda_wr_epoch(SolverState& s, Estimator& est, const FeasibleSet& set, const Schedule& sched,
                          std::size_t t, SeededRng& rng) {
  detail::optimistic_epoch(s, est, set, sched, t, rng, detail::Sampling::replacement);
}

inline void sgda_rr_epoch(SolverState& s, Estimator& est, const FeasibleSet& set, const Schedule& sched,
                          std::size_t t, SeededRng& rng) {
  detail::plain_epoch(s, est, set, sched, t, rng, detail::Sampling::reshuffle);
}

inline void sgda_wr_epoch(SolverState& s, Estimator& est, const FeasibleSet& set, const Schedule& sched,
                          std::size_t t, SeededRng& rng) {
  detail::plain_epoch(s, est, set, sched, t, rng, detail::Sampling::replacement);
}

inline void run_epoch(Variant variant, SolverState& s, Estimator& est, const FeasibleSet& set,
                      const Schedule& sched, std::size_t t, SeededRng& rng) {
  switch (variant) {
    case Variant::ogda_rr: ogda_rr_epoch(s, est, set, sched, t, rng); break;
    case Variant::ogda_wr: ogda_wr_epoch(s, est, set, sched, t, rng); break;
    case Variant::sgda_rr: sgda_rr_epoch(s, est, set, sched, t, rng); break;
    case Variant::sgda_wr: sgda_wr_epoch(s, est, set, sched, t, rng); break;
  }
}

/// max |F(u) - F(u')| / |u - u'| over random feasible pairs; needs exact gradients.
inline double estimate_smoothness(const FiniteSumOracle& oracle, const FeasibleSet& set, SeededRng& rng,
                                  std::size_t pairs = 1000) {
  double best = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    const Vector a = sample_point(set, rng);
    // Alternate far pairs with nearby ones to probe local curvature.
    Vector b = (p % 2 == 0) ? sample_point(set, rng) : Vector(a + 1e-3 * rng.sphere(set.dim()));
    const double dist = (a - b).norm();
    if (dist <= 0.0) continue;
    best = std::max(best, (exact_operator(oracle, a) - exact_operator(oracle, b)).norm() / dist);
  }
  return best;
}

struct SolverConfig {
  Variant variant = Variant::ogda_rr;
  std::size_t epochs = 100;
  Schedule schedule;
  EstimatorMode mode = EstimatorMode::full_zo;
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  std::size_t snapshot_every = 0;     // 0 disables snapshots
  std::optional<double> smoothness;   // user-supplied smoothness bound
};

struct RunHooks {
  /// Suboptimality of the running average, recorded in the trace.
  std::function<double(const Vector&)> suboptimality;
  /// Return true to stop after the current epoch.
  std::function<bool(const TraceRecord&)> stop;
  Estimator::Observer estimate_observer;
};

/// Numerical failure part-way through run(); carries the trace recorded so far.
class RunFailure : public NumericalFailure {
 public:
  RunFailure(const NumericalFailure& cause, Trace partial) : NumericalFailure(cause), trace(std::move(partial)) {}
  Trace trace;
};

struct RunResult {
  Vector average;  // step-size-weighted average of all inner iterates
  Vector last;
  Trace trace;
  std::uint64_t queries = 0;
  std::size_t epochs_run = 0;
  std::vector<std::string> warnings;
};

inline RunResult run(const SolverConfig& config, const FiniteSumOracle& oracle, const FeasibleSet& set,
                     std::optional<Vector> start = std::nullopt, const RunHooks& hooks = {}) {
  if (config.epochs < 1) throw std::invalid_argument("run: need at least one epoch");
  if (oracle.dim() != set.dim()) throw std::invalid_argument("run: oracle and feasible set dimensions differ");
  config.schedule.validate();

  RunResult result;
  if (config.smoothness) {
    if (config.schedule.eta0 >= 0.5 / *config.smoothness)
      result.warnings.push_back("eta0 is not below 1/(2*smoothness)");
  }

  Estimator est(oracle, config.mode);
  if (hooks.estimate_observer) est.set_observer(hooks.estimate_observer);
  SeededRng rng(config.seed);
  Vector u0 = start ? project(set, *start) : project(set, Vector::Zero(static_cast<Eigen::Index>(set.dim())));
  SolverState state(u0);

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t every = std::max<std::size_t>(1, config.record_every);
  for (std::size_t t = 0; t < config.epochs; ++t) {
    try {
      run_epoch(config.variant, state, est, set, config.schedule, t, rng);
    } catch (const NumericalFailure& e) {
      throw RunFailure(e, std::move(result.trace));
    }
    result.epochs_run = t + 1;
    const bool last = t + 1 == config.epochs;
    if ((t + 1) % every == 0 || last || t == 0) {
      TraceRecord rec{t + 1, est.counter().component_evaluations, std::nullopt,
                      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()};
      if (hooks.suboptimality) rec.suboptimality = hooks.suboptimality(state.average.value());
      result.trace.records.push_back(rec);
      if (hooks.stop && hooks.stop(rec)) break;
    }
    if (config.snapshot_every > 0 && ((t + 1) % config.snapshot_every == 0 || last))
      result.trace.snapshots.push_back({t + 1, state.average.value()});
  }

  result.average = state.average.value();
  result.last = state.u;
  result.queries = est.counter().component_evaluations;
  return result;
}

enum class ReferenceMethod { ogda, gda };

struct ReferenceOptions {
  double tol = 1e-10;
  std::size_t max_iters = 1'000'000;
  ReferenceMethod method = ReferenceMethod::ogda;
  std::optional<double> smoothness;
  std::uint64_t seed = 12345;  // only used to estimate smoothness
};

struct ReferenceResult {
  Vector point;
  double residual;
  std::size_t iterations;
  double step;
};

/// Full-batch first-order saddle solver, step 1/(4*smoothness). Stops when the
/// fixed-point residual |u - proj(u - step*F(u))| drops to tol.
inline ReferenceResult reference_saddle(const FiniteSumOracle& oracle, const FeasibleSet& set,
                                        const ReferenceOptions& opt = {},
                                        std::optional<Vector> start = std::nullopt) {
  if (!oracle.all_analytic()) throw UnsupportedMode("reference_saddle needs exact gradients on every block");
  if (oracle.dim() != set.dim()) throw std::invalid_argument("reference_saddle: dimension mismatch");

  double ell = 0.0;
  if (opt.smoothness) {
    ell = *opt.smoothness;
  } else {
    SeededRng rng(opt.seed);
    ell = estimate_smoothness(oracle, set, rng);
  }
  if (!(ell > 0.0)) ell = 1.0;
  double eta = 1.0 / (4.0 * ell);

  const Vector origin = start ? project(set, *start) : project(set, Vector::Zero(static_cast<Eigen::Index>(set.dim())));
  auto residual_at = [&](const Vector& u, const Vector& f) { return (u - project(set, u - eta * f)).norm(); };

  Vector u = origin;
  Vector f = exact_operator(oracle, u);
  Vector f_prev = f;
  Vector best = u;
  double best_res = residual_at(u, f);
  for (std::size_t k = 0; k < opt.max_iters; ++k) {
    const double res = residual_at(u, f);
    if (!std::isfinite(res)) throw NumericalFailure("reference solver diverged");
    if (res <= opt.tol) return {u, res, k, eta};
    if (res < best_res) {
      best_res = res;
      best = u;
    } else if (res > 1e3 * best_res + 1.0) {
      // Sampled smoothness was too optimistic; back off and restart from the best point.
      eta *= 0.5;
      u = best;
      f = exact_operator(oracle, u);
      f_prev = f;
      best_res = residual_at(u, f);
      continue;
    }
    const Vector dir = opt.method == ReferenceMethod::ogda ? Vector(2.0 * f - f_prev) : f;
    u = project(set, u - eta * dir);
    f_prev = f;
    f = exact_operator(oracle, u);
  }
  throw NonConvergence("reference saddle did not converge", residual_at(u, f));
}

}  // namespace zominmax
