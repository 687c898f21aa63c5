#pragma once

// Shared fixtures for the test suites.

#include <initializer_list>
#include <memory>
#include <vector>

#include "zominmax/data.hpp"
#include "zominmax/oracle.hpp"
#include "zominmax/toy.hpp"
#include "zominmax/wdrsc.hpp"

namespace testing {

using zominmax::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

/// Single-component quadratic u'Au + b'u on R^d (one minimizing block).
struct Quadratic {
  Eigen::MatrixXd a;
  Vector b;

  double value(const Vector& u) const { return u.dot(a * u) + b.dot(u); }
  Vector gradient(const Vector& u) const { return (a + a.transpose()) * u + b; }
  double smoothness() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a + a.transpose());
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }

  std::shared_ptr<zominmax::LambdaOracle> oracle(bool analytic = true) const {
    auto self = *this;
    zominmax::LambdaOracle::GradientFn grad;
    if (analytic) grad = [self](std::size_t, const Vector& u) { return self.gradient(u); };
    return std::make_shared<zominmax::LambdaOracle>(
        1, static_cast<std::size_t>(b.size()), 0, [self](std::size_t, const Vector& u) { return self.value(u); },
        grad);
  }
};

inline Quadratic random_quadratic(std::size_t d, std::uint64_t seed) {
  zominmax::SeededRng rng(seed);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal();
  return {0.5 * (m + m.transpose()), rng.gaussian(d)};
}

/// Two-player oracle L(x, y) from callables, scalar x and y, n = 1.
inline std::shared_ptr<zominmax::LambdaOracle> scalar_game(std::function<double(double, double)> f,
                                                           std::function<Vector(double, double)> grad = {}) {
  zominmax::LambdaOracle::GradientFn g;
  if (grad) g = [grad](std::size_t, const Vector& u) { return grad(u[0], u[1]); };
  return std::make_shared<zominmax::LambdaOracle>(
      1, 1, 1, [f](std::size_t, const Vector& u) { return f(u[0], u[1]); }, g);
}

/// Dataset from explicit rows.
inline zominmax::StrategicDataset dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                          std::vector<bool> mask = {}) {
  zominmax::StrategicDataset ds;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ds.labels = labels;
  ds.strategic_mask = mask.empty() ? std::vector<bool>(rows.front().size(), true) : mask;
  for (std::size_t j = 0; j < rows.front().size(); ++j) ds.feature_names.push_back("x" + std::to_string(j));
  return ds;
}

inline zominmax::WdrscObjective synthetic_objective(std::size_t n, std::size_t d, std::size_t strategic,
                                                    std::uint64_t seed, double zeta = 0.05, double alpha_max = 12.5) {
  auto syn = zominmax::generate_synthetic({n, d, 0.1, strategic, seed});
  auto ds = std::make_shared<const zominmax::StrategicDataset>(syn.dataset);
  return zominmax::build_objective(ds, zominmax::BestResponseModel::quadratic(zeta, ds->strategic_mask),
                                   zominmax::GlmLink::logistic(), {0.4, 0.5, alpha_max});
}

/// Central differences of L_i, step h.
inline Vector fd_gradient(const zominmax::FiniteSumOracle& o, std::size_t i, const Vector& u, double h = 1e-5) {
  Vector g(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    Vector up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    g[j] = (o.component(i, up) - o.component(i, dn)) / (2.0 * h);
  }
  return g;
}

}  // namespace testing
