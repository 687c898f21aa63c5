#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "zominmax/solvers.hpp"
#include "zominmax/wdrsc.hpp"

using namespace zominmax;
using testing::vec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::shared_ptr<const StrategicDataset> tiny(std::vector<bool> mask = {}) {
  return std::make_shared<const StrategicDataset>(
      testing::dataset({{1.0, 0.0}, {1.0, 0.0}, {-0.5, 2.0}}, {-1, 1, 1}, std::move(mask)));
}

WdrscObjective tiny_objective(std::vector<bool> mask = {}) {
  auto ds = tiny(mask);
  return build_objective(ds, BestResponseModel::quadratic(0.05, ds->strategic_mask), GlmLink::logistic(),
                         {0.4, 0.5, 12.5});
}

// Independent evaluator of the full objective, written from the closed form:
// alpha (delta - kappa) + mean over positives of phi(m) + gamma (m - alpha kappa)
// plus mean over negatives of phi(m) + m, with a naive logistic phi.
double monolithic(const StrategicDataset& ds, double zeta, const Vector& u, double delta, double kappa) {
  const auto d = static_cast<Eigen::Index>(ds.d());
  const Vector theta = u.head(d);
  const double alpha = u[d];
  const Vector mask = mask_vector(ds.strategic_mask);
  double sum = 0.0;
  Eigen::Index slot = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Vector x = ds.x(i);
    const double phi_arg = ds.labels[i] == 1 ? x.dot(theta) : x.dot(theta) + zeta * mask.cwiseProduct(theta).squaredNorm();
    const double phi = std::log(1.0 + std::exp(phi_arg)) - phi_arg / 2.0;
    if (ds.labels[i] == 1) {
      sum += phi + u[d + 1 + slot++] * (phi_arg - alpha * kappa);
    } else {
      sum += phi + phi_arg;
    }
  }
  return alpha * (delta - kappa) + sum / static_cast<double>(ds.n());
}

// Gradient ascent on the agent utility over the masked coordinates.
Vector ascend_utility(const Vector& x0, int label, const Vector& theta, double zeta, const Vector& mask) {
  Vector x = x0;
  for (int k = 0; k < 200; ++k) {
    const Vector grad = 0.5 * (1.0 - label) * theta - (x - x0) / zeta;
    x += 0.5 * zeta * mask.cwiseProduct(grad);
  }
  return x;
}

}  // namespace

TEST_CASE("positive examples do not move") {
  const auto obj = tiny_objective();
  SeededRng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vector theta = rng.gaussian(2);
    CHECK(best_response(obj, 1, theta) == obj.dataset().x(1));
  }
}

TEST_CASE("negative examples move along theta on the mask") {
  const Vector theta = vec({2, 2});
  Vector b = best_response(tiny_objective(), 0, theta);
  CHECK_THAT(b[0], WithinAbs(1.1, 1e-15));
  CHECK_THAT(b[1], WithinAbs(0.1, 1e-15));
  const Vector numeric = ascend_utility(vec({1, 0}), -1, theta, 0.05, vec({1, 1}));
  CHECK((b - numeric).norm() <= 1e-8);

  b = best_response(tiny_objective({true, false}), 0, theta);
  CHECK_THAT(b[0], WithinAbs(1.1, 1e-15));
  CHECK(b[1] == 0.0);
  CHECK((b - ascend_utility(vec({1, 0}), -1, theta, 0.05, vec({1, 0}))).norm() <= 1e-8);

  CHECK_THROWS_AS(best_response(tiny_objective(), 0, vec({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("best response beats nearby candidates") {
  const auto obj = testing::synthetic_objective(40, 4, 2, 2);
  const auto& ds = obj.dataset();
  const Vector mask = obj.model().mask();
  SeededRng rng(3);
  double worst = 1e300;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Vector theta = rng.gaussian(4);
    const Vector x0 = ds.x(i);
    const Vector b = best_response(obj, i, theta);
    const double best = quadratic_utility(b, x0, ds.labels[i], theta, 0.05);
    for (int k = 0; k < 100; ++k) {
      const Vector cand = b + 0.1 * rng.gaussian(4).cwiseProduct(mask);
      worst = std::min(worst, best - quadratic_utility(cand, x0, ds.labels[i], theta, 0.05));
    }
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("response inner product") {
  const auto obj = tiny_objective();
  const Vector theta = vec({2, 2});
  CHECK(obj.response_inner_product(1, theta) == obj.dataset().x(1).dot(theta));
  CHECK_THAT(obj.response_inner_product(0, theta), WithinAbs(2.4, 1e-12));
  CHECK(obj.response_inner_product(0, Vector::Zero(2)) == 0.0);
}

TEST_CASE("strategic margin identity") {
  const auto obj = testing::synthetic_objective(60, 5, 3, 4);
  const auto& ds = obj.dataset();
  const Vector mask = obj.model().mask();
  SeededRng rng(5);
  double worst = 0.0;
  int checked = 0;
  while (checked < 1000) {
    const std::size_t i = rng.index(ds.n());
    if (ds.labels[i] != -1) continue;
    const Vector theta = 3.0 * rng.gaussian(5);
    const double lhs = best_response(obj, i, theta).dot(theta);
    const double rhs = ds.x(i).dot(theta) + 0.05 * mask.cwiseProduct(theta).squaredNorm();
    worst = std::max(worst, std::abs(lhs - rhs));
    ++checked;
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("component loss values") {
  const auto obj = tiny_objective();
  Vector u = Vector::Zero(static_cast<Eigen::Index>(obj.dim()));
  for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(obj.component(i, u), WithinAbs(std::log(2.0), 1e-15));
  u[2] = 1.0;  // alpha
  u[3] = 1.0;  // gamma for example 1
  CHECK_THAT(obj.component(1, u), WithinAbs(-0.1 + std::log(2.0) - 0.5, 1e-15));
  CHECK_THAT(obj.component(1, u), WithinAbs(0.0931472, 1e-7));
}

TEST_CASE("average of components equals the monolithic objective") {
  const auto obj = testing::synthetic_objective(50, 4, 2, 6);
  const auto set = obj.constraint_set();
  SeededRng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector u = sample_point(set, rng);
    worst = std::max(worst, std::abs(obj.loss(u) - monolithic(obj.dataset(), 0.05, u, 0.4, 0.5)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("stable link matches the naive form") {
  const auto link = GlmLink::logistic();
  for (double z = -30.0; z <= 30.0; z += 0.25)
    REQUIRE_THAT(link.phi(z), WithinAbs(std::log(1.0 + std::exp(z)) - z / 2.0, 1e-13));
  CHECK(std::isfinite(link.phi(1e4)));
  CHECK_THAT(link.phi(1e4), WithinRel(5e3, 1e-15));
  CHECK_THAT(link.phi(-1e4), WithinRel(5e3, 1e-15));
}

TEST_CASE("exact gradients agree with finite differences") {
  const auto obj = testing::synthetic_objective(30, 4, 2, 8);
  const auto set = obj.constraint_set();
  SeededRng rng(9);
  for (int k = 0; k < 100; ++k) {
    const Vector u = sample_point(set, rng);
    const std::size_t i = rng.index(obj.size());
    Vector g = Vector::Zero(static_cast<Eigen::Index>(obj.dim()));
    obj.analytic_partials(i, u, g);
    const Vector fd = testing::fd_gradient(obj, i, u);
    for (Eigen::Index j = 0; j < g.size(); ++j)
      REQUIRE(std::abs(g[j] - fd[j]) <= 1e-4 * std::max(1.0, std::abs(fd[j])));
  }
}

TEST_CASE("gradient examples") {
  const auto obj = tiny_objective();
  Vector u = Vector::Zero(static_cast<Eigen::Index>(obj.dim()));
  // Negative example at theta = 0: (phi'(0) + 1) x = x.
  const Vector g0 = obj.partial_gradient(0, 0, u);
  CHECK(g0.isApprox(obj.dataset().x(0)));
  CHECK(obj.partial_gradient(2, 0, u).isZero(0.0));
  CHECK_THAT(obj.partial_gradient(1, 1, u)[0], WithinAbs(-0.1, 1e-15));

  u[2] = 2.0;
  u[4] = 0.5;  // gamma for example 2
  const Vector gg = obj.partial_gradient(2, 2, u);
  CHECK(gg[0] == 0.0);
  CHECK_THAT(gg[1], WithinAbs(-2.0 * 0.5, 1e-15));
  CHECK_THAT(obj.partial_gradient(1, 2, u)[0], WithinAbs(-0.1 - 0.5 * 0.5, 1e-15));
}

TEST_CASE("objective layout and constraint set") {
  auto ds = std::make_shared<const StrategicDataset>(testing::dataset({{1, 2, 3}, {4, 5, 6}}, {1, -1}));
  const auto obj = build_objective(ds, BestResponseModel::quadratic(0.05, ds->strategic_mask), GlmLink::logistic(),
                                   {0.4, 0.5, 12.5});
  CHECK(obj.dim() == 3 + 1 + 1);
  CHECK(obj.size() == 2);
  CHECK(obj.blocks()[2].player == Player::maximize);
  CHECK(obj.gamma_slot(1) == -1);
  CHECK(obj.link().beta == 0.25);
  CHECK_THAT(obj.soc_scale(), WithinAbs(0.8, 1e-15));
  CHECK(obj.constraint_set().dim() == obj.dim());

  auto neg = std::make_shared<const StrategicDataset>(testing::dataset({{1, 2}, {3, 4}}, {-1, -1}));
  CHECK_THROWS_WITH(build_objective(neg, BestResponseModel::quadratic(0.05, neg->strategic_mask),
                                    GlmLink::logistic(), {0.4, 0.5, 12.5}),
                    Catch::Matchers::ContainsSubstring("empty max block"));
  CHECK_THROWS_AS(build_objective(ds, BestResponseModel::quadratic(0.05, ds->strategic_mask), GlmLink::logistic(),
                                  {0.0, 0.5, 12.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(BestResponseModel::quadratic(0.0, ds->strategic_mask), std::invalid_argument);
}

TEST_CASE("logistic curvature peaks at one quarter") {
  const auto link = GlmLink::logistic();
  const double h = 1e-4;
  double sup = 0.0;
  for (double z = -10.0; z <= 10.0; z += 0.01)
    sup = std::max(sup, (link.phi(z + h) - 2.0 * link.phi(z) + link.phi(z - h)) / (h * h));
  CHECK_THAT(sup, WithinAbs(link.beta, 1e-5));
}

TEST_CASE("link is convex and phi plus identity is nondecreasing") {
  const auto link = GlmLink::logistic();
  for (int k = -5000; k <= 5000; ++k) {
    const double z = 0.01 * k;
    REQUIRE(link.dphi(z) + 1.0 >= -1e-12);
  }
  const double h = 1e-3;
  for (double z = -20.0; z <= 20.0; z += 0.05)
    REQUIRE(link.phi(z + h) - 2.0 * link.phi(z) + link.phi(z - h) >= -1e-12);
}

TEST_CASE("objective is convex in (theta, alpha) and affine in gamma") {
  const auto obj = testing::synthetic_objective(40, 4, 2, 10);
  const auto set = obj.constraint_set();
  const auto mins = static_cast<Eigen::Index>(obj.theta_dim() + 1);
  SeededRng rng(11);
  double worst_convex = -1e300, worst_affine = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector a = sample_point(set, rng);
    Vector b = sample_point(set, rng);
    b.tail(b.size() - mins) = a.tail(a.size() - mins);
    worst_convex = std::max(worst_convex, obj.loss(0.5 * (a + b)) - 0.5 * (obj.loss(a) + obj.loss(b)));

    Vector dir = Vector::Zero(a.size());
    dir.tail(a.size() - mins) = rng.gaussian(static_cast<std::size_t>(a.size() - mins));
    worst_affine = std::max(worst_affine, std::abs(obj.loss(a + dir) - 2.0 * obj.loss(a) + obj.loss(a - dir)));
  }
  CHECK(worst_convex <= 1e-9);
  CHECK(worst_affine <= 1e-12);
}

TEST_CASE("quadratic movement cost properties") {
  const double zeta = 0.05;
  auto g = [zeta](const Vector& x) { return x.squaredNorm() / (2.0 * zeta); };
  SeededRng rng(12);
  for (int k = 0; k < 100; ++k) {
    const Vector x = rng.gaussian(3), y = rng.gaussian(3);
    CHECK(g(x) > 0.0);
    CHECK(g(0.5 * (x + y)) <= 0.5 * (g(x) + g(y)) + 1e-12);
    const double a = 3.0 * rng.uniform();
    CHECK_THAT(g(a * x), WithinRel(a * a * g(x), 1e-14));
  }
  CHECK(g(Vector::Zero(3)) == 0.0);

  // Conjugate sup_x <x, theta> - g(x) against zeta |theta|^2 / 2 over a fine grid.
  const Vector theta = vec({2, -1});
  double sup = -1e300;
  const double step = 2e-4;
  for (int a = 0; a <= 1000; ++a)
    for (int b = -500; b <= 500; ++b) {
      const Vector x = vec({a * step, b * step});
      sup = std::max(sup, x.dot(theta) - g(x));
    }
  CHECK_THAT(sup, WithinAbs(zeta * theta.squaredNorm() / 2.0, 1e-6));
}

TEST_CASE("custom response models are black boxes") {
  auto ds = tiny();
  auto shifted = BestResponseModel::custom(
      [](const Vector& x, int, const Vector& theta) -> Vector { return x + 0.05 * theta; });
  const auto obj = build_objective(ds, shifted, GlmLink::logistic(), {0.4, 0.5, 12.5});
  const auto same = tiny_objective();
  const Vector u = vec({0.3, -0.2, 1.0, 0.4, -0.7});
  for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(obj.component(i, u), WithinAbs(same.component(i, u), 1e-15));

  CHECK_FALSE(obj.blocks()[0].analytic);
  CHECK_THROWS_AS(obj.with_exact_theta(true), UnsupportedMode);
  CHECK_THROWS_AS(obj.partial_gradient(0, 0, u), UnsupportedMode);
  CHECK_THROWS_AS(reference_saddle(obj, obj.constraint_set()), UnsupportedMode);
  CHECK_THROWS_AS(shifted.with_zeta(0.1), UnsupportedMode);
  // Hybrid mode still works: alpha and gamma are exact, theta is queried.
  CHECK_NOTHROW(Estimator(obj, EstimatorMode::hybrid));
}
