#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "zominmax/oracle.hpp"
#include "zominmax/random.hpp"

using namespace zominmax;
using testing::vec;
using Catch::Matchers::WithinAbs;

TEST_CASE("sphere on S^0 is a fair coin") {
  SeededRng rng(1);
  int plus = 0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const Vector v = sample_sphere(rng, 1);
    REQUIRE(std::abs(v[0]) == 1.0);
    plus += v[0] > 0;
  }
  const double sigma = std::sqrt(draws * 0.25);
  CHECK(std::abs(plus - draws / 2.0) <= 3.0 * sigma);
}

TEST_CASE("sphere draws are unit norm and centered") {
  SeededRng rng(2);
  for (int k = 0; k < 1000; ++k) REQUIRE(std::abs(sample_sphere(rng, 3).norm() - 1.0) <= 1e-12);
  Vector mean = Vector::Zero(2);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) mean += sample_sphere(rng, 2);
  CHECK((mean / draws).norm() <= 0.02);
  CHECK_THROWS_AS(sample_sphere(rng, 0), std::invalid_argument);
}

TEST_CASE("same seed, same stream") {
  SeededRng a(77), b(77);
  for (int k = 0; k < 50; ++k) {
    REQUIRE(a.sphere(4) == b.sphere(4));
    REQUIRE(a.permutation(6) == b.permutation(6));
    REQUIRE(a.normal() == b.normal());
  }
}

TEST_CASE("zo_gradient of a constant loss") {
  LambdaOracle one(1, 3, 0, [](std::size_t, const Vector&) { return 1.0; });
  QueryCounter counter;
  const auto est = zo_gradient(one, 0, Vector::Zero(3), 0.5, vec({1, 0, 0}), QueryBlock::full(one), counter);
  CHECK(est.value.isApprox(vec({6, 0, 0})));
  CHECK(est.radius == 0.5);
  CHECK(counter.component_evaluations == 1);
}

TEST_CASE("zo_gradient of a linear loss") {
  const Vector a = vec({1, 2});
  LambdaOracle lin(1, 2, 0, [a](std::size_t, const Vector& u) { return a.dot(u); });
  QueryCounter counter;
  const auto block = QueryBlock::full(lin);
  const auto est = zo_gradient(lin, 0, Vector::Zero(2), 0.1, vec({1, 0}), block, counter);
  CHECK_THAT(est.value[0], WithinAbs(2.0, 1e-12));
  CHECK_THAT(est.value[1], WithinAbs(0.0, 1e-12));

  // E[d <a, v> v] = a.
  SeededRng rng(4);
  Vector mean = Vector::Zero(2);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) mean += zo_gradient(lin, 0, Vector::Zero(2), 0.1, rng.sphere(2), block, counter).value;
  mean /= draws;
  CHECK_THAT(mean[0], WithinAbs(1.0, 0.05));
  CHECK_THAT(mean[1], WithinAbs(2.0, 0.05));
  CHECK(counter.component_evaluations == 1 + static_cast<std::uint64_t>(draws));
}

TEST_CASE("zo_gradient rejects bad radius and direction") {
  LambdaOracle one(1, 2, 0, [](std::size_t, const Vector&) { return 1.0; });
  QueryCounter counter;
  const auto block = QueryBlock::full(one);
  CHECK_THROWS_AS(zo_gradient(one, 0, Vector::Zero(2), 0.0, vec({1, 0}), block, counter), std::invalid_argument);
  CHECK_THROWS_AS(zo_gradient(one, 0, Vector::Zero(2), -1.0, vec({1, 0}), block, counter), std::invalid_argument);
  CHECK_THROWS_AS(zo_gradient(one, 0, Vector::Zero(2), 0.1, vec({1, 1}), block, counter), std::invalid_argument);
  CHECK_NOTHROW(zo_gradient(one, 0, Vector::Zero(2), 0.1, vec({1 + 5e-7, 0}), block, counter));
  CHECK(counter.component_evaluations == 1);
}

TEST_CASE("zo_gradient flips the sign on maximizing coordinates") {
  // L(x, y) = x + y: F = (1, -1).
  auto game = testing::scalar_game([](double x, double y) { return x + y; });
  QueryCounter counter;
  const double r = 1.0 / std::sqrt(2.0);
  const auto est = zo_gradient(*game, 0, Vector::Zero(2), 0.1, vec({r, r}), QueryBlock::full(*game), counter);
  // (2/0.1) * (0.1 * sqrt(2)) * v = 2 sqrt(2) v, then the y entry is negated.
  CHECK_THAT(est.value[0], WithinAbs(2.0, 1e-12));
  CHECK_THAT(est.value[1], WithinAbs(-2.0, 1e-12));
}

TEST_CASE("non-finite loss is a numerical failure") {
  LambdaOracle bad(1, 2, 0, [](std::size_t, const Vector&) { return std::nan(""); });
  QueryCounter counter;
  CHECK_THROWS_AS(zo_gradient(bad, 0, Vector::Zero(2), 0.1, vec({1, 0}), QueryBlock::full(bad), counter),
                  NumericalFailure);
}

TEST_CASE("hybrid with every block analytic is the exact operator") {
  auto game = testing::scalar_game([](double x, double y) { return x * x - y * y + x * y; },
                                   [](double x, double y) { return vec({2 * x + y, -2 * y + x}); });
  SeededRng rng(5);
  QueryCounter counter;
  const Vector u = vec({0.3, -0.7});
  const Vector g = hybrid_gradient(*game, 0, u, 0.1, rng, counter);
  CHECK(g.isApprox(exact_operator(*game, 0, u)));
  CHECK(g.isApprox(vec({2 * 0.3 - 0.7, -(-2 * -0.7 + 0.3)})));
  CHECK(counter.component_evaluations == 0);
}

TEST_CASE("hybrid needs an analytic block") {
  LambdaOracle blind(1, 2, 0, [](std::size_t, const Vector& u) { return u.squaredNorm(); });
  SeededRng rng(5);
  QueryCounter counter;
  CHECK_THROWS_AS(hybrid_gradient(blind, 0, Vector::Zero(2), 0.1, rng, counter), UnsupportedMode);
  CHECK_THROWS_AS(Estimator(blind, EstimatorMode::hybrid), UnsupportedMode);
}

TEST_CASE("hybrid on WDRSC: exact alpha and gamma, one query for theta") {
  auto ds = std::make_shared<const StrategicDataset>(
      testing::dataset({{1.0, 0.5}, {-0.3, 2.0}, {0.7, -1.1}}, {1, -1, 1}));
  const auto obj = build_objective(ds, BestResponseModel::quadratic(0.05, ds->strategic_mask), GlmLink::logistic(),
                                   {0.4, 0.5, 12.5});
  const auto blind = obj.with_exact_theta(false);
  // u = (theta = 0, alpha = 1, gamma = (0.6, -0.2)); component 0 is positive with gamma slot 0.
  Vector u = Vector::Zero(static_cast<Eigen::Index>(obj.dim()));
  u[2] = 1.0;
  u[3] = 0.6;
  u[4] = -0.2;
  SeededRng rng(8);
  QueryCounter counter;
  const Vector g = hybrid_gradient(blind, 0, u, 0.01, rng, counter);
  CHECK(counter.component_evaluations == 1);
  // d L_0 / d alpha = (delta - kappa) - kappa * gamma_0.
  CHECK_THAT(g[2], WithinAbs(-0.1 - 0.5 * 0.6, 1e-14));
  const Vector fd = testing::fd_gradient(obj, 0, u);
  CHECK_THAT(g[2], WithinAbs(fd[2], 1e-4 * std::abs(fd[2])));
  // Max block is negated; only the slot of example 0 is nonzero.
  CHECK_THAT(g[3], WithinAbs(-fd[3], 1e-4 * std::max(1.0, std::abs(fd[3]))));
  CHECK(g[4] == 0.0);
}

TEST_CASE("hybrid theta estimate is unbiased up to the smoothing bias") {
  const auto obj = testing::synthetic_objective(20, 3, 2, 3);
  const auto blind = obj.with_exact_theta(false);
  SeededRng rng(21);
  const Vector u = sample_point(obj.constraint_set(), rng);
  // A negative example exercises the strategic response.
  std::size_t i = 0;
  while (obj.dataset().labels[i] != -1) ++i;
  const double eps = 0.05;
  const int draws = 10000;
  Vector mean = Vector::Zero(3), sq = Vector::Zero(3);
  QueryCounter counter;
  for (int k = 0; k < draws; ++k) {
    const Vector g = hybrid_gradient(blind, i, u, eps, rng, counter).head(3);
    mean += g;
    sq += g.cwiseProduct(g);
  }
  mean /= draws;
  const Vector var = sq / draws - mean.cwiseProduct(mean);
  const double sigma = std::sqrt(var.sum() / draws);
  const Vector exact = obj.partial_gradient(0, i, u);
  // Local smoothness of theta -> L_i around u, by sampled gradient ratios.
  double ell = 0.0;
  for (int k = 0; k < 200; ++k) {
    Vector a = u, b = u;
    a.head(3) += eps * rng.unit_ball(3);
    b.head(3) += eps * rng.unit_ball(3);
    const double dist = (a - b).norm();
    if (dist > 0) ell = std::max(ell, (obj.partial_gradient(0, i, a) - obj.partial_gradient(0, i, b)).norm() / dist);
  }
  CHECK((mean - exact).norm() <= ell * eps + 3.0 * sigma);
}

TEST_CASE("smoothed_loss") {
  SeededRng rng(6);
  LambdaOracle c(1, 2, 0, [](std::size_t, const Vector&) { return 3.25; });
  CHECK(smoothed_loss(c, 0, vec({1, 2}), 0.7, rng, 10) == 3.25);

  LambdaOracle sq(1, 2, 0, [](std::size_t, const Vector& u) { return u.squaredNorm(); });
  CHECK_THAT(smoothed_loss(sq, 0, Vector::Zero(2), 1.0, rng, 100000), WithinAbs(0.5, 0.01));

  const Vector a = vec({1, -2});
  LambdaOracle lin(1, 2, 0, [a](std::size_t, const Vector& u) { return a.dot(u); });
  // sd of <a, w> over the unit ball is |a|/2 in 2-D; 4 sigma of the mean.
  const int m = 10000;
  CHECK_THAT(smoothed_loss(lin, 0, vec({0.5, 0.5}), 0.3, rng, m), WithinAbs(a.dot(vec({0.5, 0.5})), 4 * 0.3 * a.norm() / 2 / std::sqrt(m)));
  CHECK_THROWS_AS(smoothed_loss(lin, 0, vec({0, 0}), 0.3, rng, 0), std::invalid_argument);
}

TEST_CASE("estimator mean matches the gradient of the smoothed loss") {
  const auto q = testing::random_quadratic(4, 31);
  const auto oracle = q.oracle(false);
  const auto block = QueryBlock::full(*oracle);
  SeededRng rng(32);
  const Vector u = vec({0.2, -0.4, 0.1, 0.3});
  const double eps = 0.1;
  const int draws = 1000000;
  Vector mean = Vector::Zero(4), sq = Vector::Zero(4);
  QueryCounter counter;
  for (int k = 0; k < draws; ++k) {
    const Vector g = zo_gradient(*oracle, 0, u, eps, rng.sphere(4), block, counter).value;
    mean += g;
    sq += g.cwiseProduct(g);
  }
  mean /= draws;
  const Vector sd = (sq / draws - mean.cwiseProduct(mean)).cwiseSqrt() / std::sqrt(static_cast<double>(draws));

  // Finite differences of the Monte Carlo smoothed loss with common random numbers.
  const double h = 1e-3;
  Vector fd(4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    Vector up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    SeededRng r1(99), r2(99);
    fd[j] = (smoothed_loss(*oracle, 0, up, eps, r1, 100000) - smoothed_loss(*oracle, 0, dn, eps, r2, 100000)) / (2 * h);
  }
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(mean[j] - fd[j]) <= 3.0 * sd[j] + 1e-3 + 2.0 * q.smoothness() * eps / 100.0);
}

TEST_CASE("estimator counts one query per zeroth-order estimate") {
  const auto q = testing::random_quadratic(3, 7);
  const auto oracle = q.oracle(false);
  Estimator est(*oracle, EstimatorMode::full_zo);
  SeededRng rng(1);
  for (int k = 0; k < 5; ++k) est.estimate(0, Vector::Zero(3), 0.2, est.draw_direction(rng));
  CHECK(est.counter().component_evaluations == 5);
  CHECK(est.direction_dim() == 3);
}
