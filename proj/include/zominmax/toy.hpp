#pragma once

// Small analytic saddle problems for testing and demos.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zominmax/geometry.hpp"
#include "zominmax/oracle.hpp"
#include "zominmax/random.hpp"

namespace zominmax {

/// Oracle assembled from callables. Leave `gradient` empty for a black box.
class LambdaOracle : public FiniteSumOracle {
 public:
  using ComponentFn = std::function<double(std::size_t, const Vector&)>;
  using GradientFn = std::function<Vector(std::size_t, const Vector&)>;  // full gradient of L_i

  LambdaOracle(std::size_t n, std::size_t min_dim, std::size_t max_dim, ComponentFn component,
               GradientFn gradient = {})
      : n_(n), dim_(min_dim + max_dim), component_(std::move(component)), gradient_(std::move(gradient)) {
    if (n == 0) throw std::invalid_argument("LambdaOracle: need at least one component");
    const bool analytic = static_cast<bool>(gradient_);
    if (min_dim > 0) blocks_.push_back({"x", 0, min_dim, Player::minimize, analytic});
    if (max_dim > 0) blocks_.push_back({"y", min_dim, max_dim, Player::maximize, analytic});
  }

  std::size_t size() const override { return n_; }
  std::size_t dim() const override { return dim_; }
  const std::vector<Block>& blocks() const override { return blocks_; }
  double component(std::size_t i, const Vector& u) const override { return component_(i, u); }

  Vector partial_gradient(std::size_t b, std::size_t i, const Vector& u) const override {
    if (!gradient_) return FiniteSumOracle::partial_gradient(b, i, u);
    const auto& blk = blocks_.at(b);
    return gradient_(i, u).segment(static_cast<Eigen::Index>(blk.offset), static_cast<Eigen::Index>(blk.size));
  }

  void analytic_partials(std::size_t i, const Vector& u, Vector& grad) const override {
    if (gradient_) grad = gradient_(i, u);
  }

 private:
  std::size_t n_;
  std::size_t dim_;
  ComponentFn component_;
  GradientFn gradient_;
  std::vector<Block> blocks_;
};

/// L_i(x, y) = x' A_i y + b_i' x + c_i' y.
class BilinearFiniteSum : public FiniteSumOracle {
 public:
  BilinearFiniteSum(std::vector<Eigen::MatrixXd> a, std::vector<Vector> b, std::vector<Vector> c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (a_.empty() || a_.size() != b_.size() || a_.size() != c_.size())
      throw std::invalid_argument("bilinear: mismatched component lists");
    dx_ = static_cast<std::size_t>(a_[0].rows());
    dy_ = static_cast<std::size_t>(a_[0].cols());
    blocks_ = {{"x", 0, dx_, Player::minimize, true}, {"y", dx_, dy_, Player::maximize, true}};
  }

  std::size_t size() const override { return a_.size(); }
  std::size_t dim() const override { return dx_ + dy_; }
  const std::vector<Block>& blocks() const override { return blocks_; }

  double component(std::size_t i, const Vector& u) const override {
    const auto x = u.head(static_cast<Eigen::Index>(dx_));
    const auto y = u.tail(static_cast<Eigen::Index>(dy_));
    return x.dot(a_[i] * y) + b_[i].dot(x) + c_[i].dot(y);
  }

  Vector partial_gradient(std::size_t blk, std::size_t i, const Vector& u) const override {
    const Vector x = u.head(static_cast<Eigen::Index>(dx_));
    const Vector y = u.tail(static_cast<Eigen::Index>(dy_));
    if (blk == 0) return a_[i] * y + b_[i];
    return a_[i].transpose() * x + c_[i];
  }

 private:
  std::vector<Eigen::MatrixXd> a_;
  std::vector<Vector> b_;
  std::vector<Vector> c_;
  std::size_t dx_ = 0;
  std::size_t dy_ = 0;
  std::vector<Block> blocks_;
};

struct ToyProblem {
  std::shared_ptr<const FiniteSumOracle> oracle;
  FeasibleSet set;
};

/// Random bilinear finite sum on the product of unit balls, x and y each of
/// dimension d/2. The linear terms dominate the coupling, so the saddle lies
/// on the boundary of both balls and the gap is nondegenerate.
inline ToyProblem make_toy_bilinear(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d < 2 || d % 2 != 0) throw std::invalid_argument("toy bilinear: need n >= 1 and even d >= 2");
  const std::size_t half = d / 2;
  SeededRng rng(seed);
  const Vector b0 = 1.5 * rng.sphere(half);
  const Vector c0 = 1.5 * rng.sphere(half);
  std::vector<Eigen::MatrixXd> a;
  std::vector<Vector> b, c;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd ai(static_cast<Eigen::Index>(half), static_cast<Eigen::Index>(half));
    for (Eigen::Index r = 0; r < ai.rows(); ++r)
      for (Eigen::Index k = 0; k < ai.cols(); ++k) ai(r, k) = 0.3 * rng.normal();
    a.push_back(ai);
    b.push_back(b0 + 0.5 * rng.gaussian(half));
    c.push_back(c0 + 0.5 * rng.gaussian(half));
  }
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(half));
  return {std::make_shared<BilinearFiniteSum>(std::move(a), std::move(b), std::move(c)),
          FeasibleSet::product({FeasibleSet::ball(zero, 1.0), FeasibleSet::ball(zero, 1.0)})};
}

}  // namespace zominmax
