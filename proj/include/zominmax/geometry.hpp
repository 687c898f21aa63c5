#pragma once

// Feasible sets and exact Euclidean projections.
//
// Supported regions: axis-aligned boxes, Euclidean balls, the capped
// second-order cone {(theta, a) : |theta| <= s*a, 0 <= a <= a_max} and
// block products of these. Every set is convex and compact.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace zominmax {

using Vector = Eigen::VectorXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

struct Box {
  Vector lo;
  Vector hi;
};

struct Ball {
  Vector center;
  double radius;
};

/// {(theta, a) : |theta|_2 <= scale * a, 0 <= a <= alpha_max}; theta first, a last.
struct CappedSoc {
  std::size_t theta_dim;
  double scale;
  double alpha_max;
};

class FeasibleSet;

struct ProductBlock {
  std::size_t offset;
  std::shared_ptr<const FeasibleSet> set;
};

struct Product {
  std::vector<ProductBlock> blocks;  // sorted by offset, contiguous from 0
};

class FeasibleSet {
 public:
  using Variant = std::variant<Box, Ball, CappedSoc, Product>;

  static FeasibleSet box(Vector lo, Vector hi) {
    if (lo.size() == 0 || lo.size() != hi.size())
      throw std::invalid_argument("box: bounds must be nonempty and of equal length");
    if (!lo.allFinite() || !hi.allFinite())
      throw std::invalid_argument("box: bounds must be finite");
    if ((lo.array() > hi.array()).any())
      throw std::invalid_argument("box: lo must not exceed hi");
    return FeasibleSet(Box{std::move(lo), std::move(hi)}, static_cast<std::size_t>(hi.size()));
  }

  static FeasibleSet box(std::size_t dim, double lo, double hi) {
    return box(Vector::Constant(static_cast<Eigen::Index>(dim), lo),
               Vector::Constant(static_cast<Eigen::Index>(dim), hi));
  }

  static FeasibleSet ball(Vector center, double radius) {
    if (center.size() == 0) throw std::invalid_argument("ball: empty center");
    if (!center.allFinite()) throw std::invalid_argument("ball: center must be finite");
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("ball: radius must be positive and finite");
    const auto dim = static_cast<std::size_t>(center.size());
    return FeasibleSet(Ball{std::move(center), radius}, dim);
  }

  static FeasibleSet capped_soc(std::size_t theta_dim, double scale, double alpha_max) {
    if (theta_dim == 0) throw std::invalid_argument("capped_soc: theta block must be nonempty");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw std::invalid_argument("capped_soc: scale must be positive and finite");
    if (!(alpha_max > 0.0) || !std::isfinite(alpha_max))
      throw std::invalid_argument("capped_soc: alpha_max must be positive and finite");
    return FeasibleSet(CappedSoc{theta_dim, scale, alpha_max}, theta_dim + 1);
  }

  /// Blocks given as (offset, set); they must tile [0, total) with no gap or overlap.
  static FeasibleSet product(std::vector<std::pair<std::size_t, FeasibleSet>> parts) {
    if (parts.empty()) throw std::invalid_argument("product: no blocks");
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Product prod;
    std::size_t next = 0;
    for (auto& [offset, set] : parts) {
      if (offset != next)
        throw std::invalid_argument("product: blocks must partition the coordinates (gap or overlap at " +
                                    std::to_string(next) + ")");
      next += set.dim();
      prod.blocks.push_back({offset, std::make_shared<const FeasibleSet>(std::move(set))});
    }
    return FeasibleSet(std::move(prod), next);
  }

  /// Convenience: consecutive blocks laid out in order.
  static FeasibleSet product(std::vector<FeasibleSet> parts) {
    std::vector<std::pair<std::size_t, FeasibleSet>> placed;
    std::size_t offset = 0;
    for (auto& p : parts) {
      const auto d = p.dim();
      placed.emplace_back(offset, std::move(p));
      offset += d;
    }
    return product(std::move(placed));
  }

  std::size_t dim() const { return dim_; }
  const Variant& shape() const { return shape_; }

 private:
  FeasibleSet(Variant shape, std::size_t dim) : shape_(std::move(shape)), dim_(dim) {}

  Variant shape_;
  std::size_t dim_;
};

namespace detail {

inline void check_dim(const FeasibleSet& set, const Vector& z, const char* op) {
  if (static_cast<std::size_t>(z.size()) != set.dim())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (set " +
                                std::to_string(set.dim()) + ", point " + std::to_string(z.size()) +
                                ")");
}

inline Vector project_ball(const Vector& center, double radius, const Vector& z) {
  Vector diff = z - center;
  const double norm = diff.norm();
  if (norm <= radius) return z;
  return center + (radius / norm) * diff;
}

// Closed form for the cone {|theta| <= s*a}: keep if inside, zero if in the
// polar cone, otherwise scale onto the boundary ray (s*theta/|theta|, 1).
inline Vector project_soc(const CappedSoc& soc, const Vector& z) {
  const auto k = static_cast<Eigen::Index>(soc.theta_dim);
  const double s = soc.scale;
  Vector p(k + 1);
  const auto theta = z.head(k);
  const double a = z[k];
  const double r = theta.norm();

  if (r <= s * a) {
    p = z;
  } else if (s * r <= -a) {
    p.setZero();
  } else {
    const double c = (s * r + a) / (1.0 + s * s);
    p.head(k) = (c * s / r) * theta;
    p[k] = c;
  }

  if (p[k] > soc.alpha_max) {
    // Optimum sits on the face a = alpha_max: a disk of radius s*alpha_max.
    p[k] = soc.alpha_max;
    const double cap = s * soc.alpha_max;
    const double tn = theta.norm();
    if (tn > cap) {
      p.head(k) = (cap / tn) * theta;
    } else {
      p.head(k) = theta;
    }
  }
  return p;
}

}  // namespace detail

/// Euclidean projection of z onto the set.
inline Vector project(const FeasibleSet& set, const Vector& z) {
  detail::check_dim(set, z, "project");
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return z.cwiseMax(s.lo).cwiseMin(s.hi);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return detail::project_ball(s.center, s.radius, z);
        } else if constexpr (std::is_same_v<T, CappedSoc>) {
          return detail::project_soc(s, z);
        } else {
          Vector out(z.size());
          for (const auto& b : s.blocks) {
            const auto off = static_cast<Eigen::Index>(b.offset);
            const auto len = static_cast<Eigen::Index>(b.set->dim());
            out.segment(off, len) = project(*b.set, Vector(z.segment(off, len)));
          }
          return out;
        }
      },
      set.shape());
}

/// Largest distance between two points of the set.
inline double diameter(const FeasibleSet& set) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return (s.hi - s.lo).norm();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return 2.0 * s.radius;
        } else if constexpr (std::is_same_v<T, CappedSoc>) {
          // Extreme points are the apex and the rim circle; the farthest pair is
          // either apex-to-rim or a rim diameter.
          const double apex_to_rim = s.alpha_max * std::sqrt(1.0 + s.scale * s.scale);
          const double across_rim = 2.0 * s.scale * s.alpha_max;
          return std::max(apex_to_rim, across_rim);
        } else {
          double sq = 0.0;
          for (const auto& b : s.blocks) {
            const double d = diameter(*b.set);
            sq += d * d;
          }
          return std::sqrt(sq);
        }
      },
      set.shape());
}

/// True iff z violates no defining inequality by more than tol.
inline bool contains(const FeasibleSet& set, const Vector& z, double tol = 0.0) {
  detail::check_dim(set, z, "contains");
  if (!z.allFinite()) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return ((z - s.lo).array() >= -tol).all() && ((s.hi - z).array() >= -tol).all();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return (z - s.center).norm() - s.radius <= tol;
        } else if constexpr (std::is_same_v<T, CappedSoc>) {
          const auto k = static_cast<Eigen::Index>(s.theta_dim);
          const double a = z[k];
          return z.head(k).norm() - s.scale * a <= tol && -a <= tol && a - s.alpha_max <= tol;
        } else {
          for (const auto& b : s.blocks) {
            const auto off = static_cast<Eigen::Index>(b.offset);
            const auto len = static_cast<Eigen::Index>(b.set->dim());
            if (!contains(*b.set, Vector(z.segment(off, len)), tol)) return false;
          }
          return true;
        }
      },
      set.shape());
}

}  // namespace zominmax
