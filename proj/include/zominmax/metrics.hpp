#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zominmax/geometry.hpp"
#include "zominmax/oracle.hpp"
#include "zominmax/wdrsc.hpp"

namespace zominmax {

struct GapReport {
  double value;
  Vector reference;
  double tolerance;
};

/// Delta(x, y) = L(x, y*) - L(x*, y) against the reference saddle u* = (x*, y*).
inline GapReport gap(const FiniteSumOracle& oracle, const FeasibleSet& set, const Vector& reference, const Vector& u,
                     double tol = 1e-9) {
  if (!contains(set, reference, tol)) throw std::invalid_argument("gap: reference point is infeasible");
  if (!contains(set, u, tol)) throw std::invalid_argument("gap: evaluated point is infeasible");
  Vector x_ystar = u;      // min coordinates from u, max coordinates from u*
  Vector xstar_y = reference;
  for (const auto& b : oracle.blocks()) {
    if (b.player != Player::maximize) continue;
    const auto off = static_cast<Eigen::Index>(b.offset);
    const auto len = static_cast<Eigen::Index>(b.size);
    x_ystar.segment(off, len) = reference.segment(off, len);
    xstar_y.segment(off, len) = u.segment(off, len);
  }
  return {oracle.loss(x_ystar) - oracle.loss(xstar_y), reference, tol};
}

struct AccuracyReport {
  double margin_accuracy;  // (1/n) sum y_i <b_i(theta), theta>
  double sign_accuracy;    // fraction with sign(<b_i, theta>) == y_i, sign(0) = +1
  double zeta;
};

inline AccuracyReport accuracy(const StrategicDataset& ds, const Vector& theta, double zeta,
                               const std::vector<bool>& mask) {
  if (static_cast<std::size_t>(theta.size()) != ds.d()) throw std::invalid_argument("accuracy: theta has wrong dimension");
  const Vector m = mask_vector(mask);
  double margin = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const int y = ds.labels[i];
    Vector b = ds.x(i);
    if (y == -1) b += zeta * m.cwiseProduct(theta);
    const double score = b.dot(theta);
    margin += y * score;
    correct += ((score >= 0.0 ? 1 : -1) == y);
  }
  const auto n = static_cast<double>(ds.n());
  return {margin / n, static_cast<double>(correct) / n, zeta};
}

struct CurveRow {
  std::string classifier;
  double zeta;
  double margin_accuracy;
  double sign_accuracy;
};

inline std::vector<CurveRow> robustness_curve(const StrategicDataset& ds,
                                              const std::vector<std::pair<std::string, Vector>>& classifiers,
                                              const std::vector<double>& zetas, const std::vector<bool>& mask) {
  if (zetas.empty()) throw std::invalid_argument("robustness_curve: empty zeta grid");
  std::vector<CurveRow> rows;
  for (const auto& [name, theta] : classifiers) {
    for (double z : zetas) {
      const auto rep = accuracy(ds, theta, z, mask);
      rows.push_back({name, z, rep.margin_accuracy, rep.sign_accuracy});
    }
  }
  return rows;
}

struct BaselineOptions {
  std::size_t iterations = 5000;
  std::optional<double> step;  // defaults to 1/smoothness at the origin
};

/// Non-robust strategic logistic regression: full-batch gradient descent on
/// (1/n) sum_i phi(m_i(theta)) - (y_i/2) m_i(theta), where the response
/// m_i(theta) = <x_i, theta> + zeta |theta_mask|^2 for negative examples.
inline Vector train_strategic_logistic(const StrategicDataset& ds, double zeta, const std::vector<bool>& mask,
                                       const GlmLink& link = GlmLink::logistic(), const BaselineOptions& opt = {}) {
  ds.validate();
  const Vector mv = mask_vector(mask);
  const auto n = static_cast<double>(ds.n());
  double step = 0.0;
  if (opt.step) {
    step = *opt.step;
  } else {
    const Eigen::MatrixXd gram = ds.features.transpose() * ds.features / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double ell = link.beta * eig.eigenvalues().maxCoeff() + 2.0 * zeta;
    step = 1.0 / ell;
  }
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(ds.d()));
  for (std::size_t k = 0; k < opt.iterations; ++k) {
    Vector grad = Vector::Zero(theta.size());
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const Vector x = ds.x(i);
      const int y = ds.labels[i];
      Vector dm = x;
      double m = x.dot(theta);
      if (y == -1) {
        m += zeta * mv.cwiseProduct(theta).squaredNorm();
        dm += 2.0 * zeta * mv.cwiseProduct(theta);
      }
      grad += (link.dphi(m) - 0.5 * y) * dm;
    }
    theta -= step * grad / n;
    if (!theta.allFinite()) throw NumericalFailure("baseline training diverged");
  }
  return theta;
}

}  // namespace zominmax
