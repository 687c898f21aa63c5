#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "zominmax/geometry.hpp"

namespace zominmax {

/// Single-owner random stream. Same seed, same sequence of permutations,
/// sphere directions and Gaussians.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Uniform in {0, ..., n-1}. Consumes nothing when n == 1.
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index: empty range");
    if (n == 1) return 0;
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
  }

  /// Uniformly random permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[index(k)]);
    return perm;
  }

  Vector gaussian(std::size_t dim) {
    Vector g(static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = normal();
    return g;
  }

  /// Uniform direction on the unit sphere S^{dim-1}.
  Vector sphere(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("sphere: dimension must be at least 1");
    for (;;) {
      Vector g = gaussian(dim);
      const double norm = g.norm();
      if (norm > 0.0) return g / norm;
    }
  }

  /// Uniform point in the closed unit ball of R^dim.
  Vector unit_ball(std::size_t dim) {
    Vector dir = sphere(dim);
    return std::pow(uniform(), 1.0 / static_cast<double>(dim)) * dir;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline Vector sample_sphere(SeededRng& rng, std::size_t dim) { return rng.sphere(dim); }

/// Uniform sample from the set's volume.
inline Vector sample_point(const FeasibleSet& set, SeededRng& rng) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          Vector p(s.lo.size());
          for (Eigen::Index j = 0; j < p.size(); ++j)
            p[j] = s.lo[j] + (s.hi[j] - s.lo[j]) * rng.uniform();
          return p;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.center + s.radius * rng.unit_ball(static_cast<std::size_t>(s.center.size()));
        } else if constexpr (std::is_same_v<T, CappedSoc>) {
          // Cross-section volume grows like a^k, so a has density ∝ a^k on [0, a_max].
          const auto k = static_cast<Eigen::Index>(s.theta_dim);
          Vector p(k + 1);
          const double a = s.alpha_max * std::pow(rng.uniform(), 1.0 / static_cast<double>(k + 1));
          p.head(k) = s.scale * a * rng.unit_ball(s.theta_dim);
          p[k] = a;
          return p;
        } else {
          Vector p(static_cast<Eigen::Index>(set.dim()));
          for (const auto& b : s.blocks)
            p.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.set->dim())) =
                sample_point(*b.set, rng);
          return p;
        }
      },
      set.shape());
}

/// A point on or near the boundary: projection of a far-away Gaussian draw.
inline Vector sample_boundary(const FeasibleSet& set, SeededRng& rng) {
  const double reach = 10.0 * (diameter(set) + 1.0);
  return project(set, reach * rng.gaussian(set.dim()));
}

}  // namespace zominmax
