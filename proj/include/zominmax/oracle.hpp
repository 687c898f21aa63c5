#pragma once

// Finite-sum min-max losses L(u) = (1/n) sum_i L_i(u) and the one-shot
// sphere estimator of the saddle operator F = [grad_x L; -grad_y L].

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zominmax/errors.hpp"
#include "zominmax/geometry.hpp"
#include "zominmax/random.hpp"

namespace zominmax {

enum class Player { minimize, maximize };

/// Contiguous coordinate block of u owned by one player.
struct Block {
  std::string name;
  std::size_t offset;
  std::size_t size;
  Player player;
  bool analytic;  // exact partial gradient available
};

class FiniteSumOracle {
 public:
  virtual ~FiniteSumOracle() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual const std::vector<Block>& blocks() const = 0;

  /// L_i(u). Must be deterministic and side-effect free.
  virtual double component(std::size_t i, const Vector& u) const = 0;

  /// Gradient of L_i with respect to block b (length blocks()[b].size).
  virtual Vector partial_gradient(std::size_t b, std::size_t i, const Vector& u) const {
    (void)i;
    (void)u;
    throw UnsupportedMode("no exact gradient for block '" + blocks().at(b).name + "'");
  }

  /// Writes the analytic-block partials of L_i into grad (full length).
  /// Coordinates of query-only blocks are left untouched.
  virtual void analytic_partials(std::size_t i, const Vector& u, Vector& grad) const {
    const auto& bs = blocks();
    for (std::size_t b = 0; b < bs.size(); ++b) {
      if (!bs[b].analytic) continue;
      grad.segment(static_cast<Eigen::Index>(bs[b].offset), static_cast<Eigen::Index>(bs[b].size)) =
          partial_gradient(b, i, u);
    }
  }

  double loss(const Vector& u) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) sum += component(i, u);
    return sum / static_cast<double>(size());
  }

  bool all_analytic() const {
    for (const auto& b : blocks())
      if (!b.analytic) return false;
    return true;
  }

  bool any_analytic() const {
    for (const auto& b : blocks())
      if (b.analytic) return true;
    return false;
  }

  /// +1 on minimizing coordinates, -1 on maximizing ones.
  Vector operator_signs() const {
    Vector s = Vector::Ones(static_cast<Eigen::Index>(dim()));
    for (const auto& b : blocks())
      if (b.player == Player::maximize)
        s.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size)).setConstant(-1.0);
    return s;
  }
};

/// Exact F_i(u) = [grad_x L_i; -grad_y L_i]; requires every block analytic.
inline Vector exact_operator(const FiniteSumOracle& oracle, std::size_t i, const Vector& u) {
  if (!oracle.all_analytic()) throw UnsupportedMode("exact operator needs every block analytic");
  Vector g = Vector::Zero(static_cast<Eigen::Index>(oracle.dim()));
  oracle.analytic_partials(i, u, g);
  return g.cwiseProduct(oracle.operator_signs());
}

/// Full-batch F(u) = (1/n) sum_i F_i(u).
inline Vector exact_operator(const FiniteSumOracle& oracle, const Vector& u) {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(oracle.dim()));
  for (std::size_t i = 0; i < oracle.size(); ++i) g += exact_operator(oracle, i, u);
  return g / static_cast<double>(oracle.size());
}

struct QueryCounter {
  std::uint64_t component_evaluations = 0;
};

enum class EstimatorMode { full_zo, hybrid };

/// Coordinates perturbed by the sphere estimator, with the operator sign of each.
struct QueryBlock {
  std::vector<Eigen::Index> coords;
  Vector signs;

  std::size_t size() const { return coords.size(); }

  static QueryBlock full(const FiniteSumOracle& oracle) {
    QueryBlock q;
    const Vector s = oracle.operator_signs();
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(oracle.dim()); ++j) q.coords.push_back(j);
    q.signs = s;
    return q;
  }

  /// Union of the oracle's non-analytic blocks, in coordinate order.
  static QueryBlock query_only(const FiniteSumOracle& oracle) {
    QueryBlock q;
    std::vector<double> signs;
    for (const auto& b : oracle.blocks()) {
      if (b.analytic) continue;
      const double sign = b.player == Player::maximize ? -1.0 : 1.0;
      for (std::size_t k = 0; k < b.size; ++k) {
        q.coords.push_back(static_cast<Eigen::Index>(b.offset + k));
        signs.push_back(sign);
      }
    }
    q.signs = Eigen::Map<const Vector>(signs.data(), static_cast<Eigen::Index>(signs.size()));
    return q;
  }
};

struct ZoEstimate {
  Vector direction;
  double radius;
  Vector value;  // over the perturbed block, sign-flipped on maximizing coordinates
};

/// One-shot estimate (d/eps) * L_i(u + eps*v) * v over the query block.
inline ZoEstimate zo_gradient(const FiniteSumOracle& oracle, std::size_t i, const Vector& u, double eps,
                              const Vector& v, const QueryBlock& block, QueryCounter& counter) {
  if (!(eps > 0.0)) throw std::invalid_argument("zo_gradient: radius must be positive");
  if (i >= oracle.size()) throw std::invalid_argument("zo_gradient: component index out of range");
  if (static_cast<std::size_t>(v.size()) != block.size())
    throw std::invalid_argument("zo_gradient: direction has wrong dimension");
  if (std::abs(v.norm() - 1.0) > 1e-6) throw std::invalid_argument("zo_gradient: direction is not unit-norm");

  Vector query = u;
  for (std::size_t k = 0; k < block.size(); ++k) query[block.coords[k]] += eps * v[static_cast<Eigen::Index>(k)];
  const double value = oracle.component(i, query);
  ++counter.component_evaluations;
  if (!std::isfinite(value)) throw NumericalFailure("component loss is not finite");

  const double scale = static_cast<double>(block.size()) / eps * value;
  return {v, eps, scale * v.cwiseProduct(block.signs)};
}

/// Exact partials on analytic blocks, sphere estimate on the query-only block.
inline Vector hybrid_gradient(const FiniteSumOracle& oracle, std::size_t i, const Vector& u, double eps,
                              SeededRng& rng, QueryCounter& counter) {
  if (!oracle.any_analytic()) throw UnsupportedMode("hybrid_gradient: oracle has no analytic block");
  Vector g = Vector::Zero(static_cast<Eigen::Index>(oracle.dim()));
  oracle.analytic_partials(i, u, g);
  g = g.cwiseProduct(oracle.operator_signs());
  const QueryBlock q = QueryBlock::query_only(oracle);
  if (q.size() > 0) {
    const ZoEstimate est = zo_gradient(oracle, i, u, eps, rng.sphere(q.size()), q, counter);
    for (std::size_t k = 0; k < q.size(); ++k) g[q.coords[k]] = est.value[static_cast<Eigen::Index>(k)];
  }
  return g;
}

/// Monte Carlo estimate of E_{w ~ Unif(ball)} L_i(u + eps*w). Test helper.
inline double smoothed_loss(const FiniteSumOracle& oracle, std::size_t i, const Vector& u, double eps,
                            SeededRng& rng, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("smoothed_loss: need at least one sample");
  double sum = 0.0;
  for (std::size_t m = 0; m < samples; ++m) sum += oracle.component(i, u + eps * rng.unit_ball(oracle.dim()));
  return sum / static_cast<double>(samples);
}

/// Stateful operator estimator used by the solvers: owns the query counter.
class Estimator {
 public:
  using Observer = std::function<void(const Vector& estimate, double eps)>;

  Estimator(const FiniteSumOracle& oracle, EstimatorMode mode) : oracle_(&oracle), mode_(mode) {
    if (mode == EstimatorMode::hybrid) {
      if (!oracle.any_analytic()) throw UnsupportedMode("hybrid mode needs at least one analytic block");
      block_ = QueryBlock::query_only(oracle);
    } else {
      block_ = QueryBlock::full(oracle);
    }
    signs_ = oracle.operator_signs();
  }

  const FiniteSumOracle& oracle() const { return *oracle_; }
  EstimatorMode mode() const { return mode_; }

  /// Dimension of the sphere directions; zero when everything is analytic.
  std::size_t direction_dim() const { return block_.size(); }

  /// F_i(u) estimate with the given direction (ignored when direction_dim() == 0).
  Vector estimate(std::size_t i, const Vector& u, double eps, const Vector& v) {
    Vector g;
    if (mode_ == EstimatorMode::full_zo) {
      g = zo_gradient(*oracle_, i, u, eps, v, block_, counter_).value;
    } else {
      g = Vector::Zero(static_cast<Eigen::Index>(oracle_->dim()));
      oracle_->analytic_partials(i, u, g);
      g = g.cwiseProduct(signs_);
      if (block_.size() > 0) {
        const Vector zo = zo_gradient(*oracle_, i, u, eps, v, block_, counter_).value;
        for (std::size_t k = 0; k < block_.size(); ++k) g[block_.coords[k]] = zo[static_cast<Eigen::Index>(k)];
      }
      if (!g.allFinite()) throw NumericalFailure("analytic gradient is not finite");
    }
    if (observer_) observer_(g, eps);
    return g;
  }

  Vector draw_direction(SeededRng& rng) const {
    return block_.size() > 0 ? rng.sphere(block_.size()) : Vector();
  }

  const QueryCounter& counter() const { return counter_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  const FiniteSumOracle* oracle_;
  EstimatorMode mode_;
  QueryBlock block_;
  Vector signs_;
  QueryCounter counter_;
  Observer observer_;
};

}  // namespace zominmax
