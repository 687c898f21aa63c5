#pragma once

// Wasserstein distributionally robust strategic classification as a
// finite-sum convex-concave saddle problem over u = (theta, alpha, gamma).
//
//   L_i(u) = alpha (delta - kappa)
//          + [y_i = +1] (phi(m_i) + gamma_i (m_i - alpha kappa))
//          + [y_i = -1] (phi(m_i) + m_i),          m_i = <b_i(theta), theta>
//
// subject to |theta| <= alpha / (beta + 1), |gamma|_inf <= 1. gamma only has
// coordinates for positive examples; the others would multiply zero.
//
// The adversary may move features of every example but flips labels only of
// positive examples. Agents with label -1 are the only strategic ones.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "zominmax/errors.hpp"
#include "zominmax/geometry.hpp"
#include "zominmax/oracle.hpp"

namespace zominmax {

struct StrategicDataset {
  Eigen::MatrixXd features;  // n x d, one example per row
  std::vector<int> labels;   // each -1 or +1
  std::vector<bool> strategic_mask;
  std::vector<std::string> feature_names;

  std::size_t n() const { return labels.size(); }
  std::size_t d() const { return static_cast<std::size_t>(features.cols()); }
  Vector x(std::size_t i) const { return features.row(static_cast<Eigen::Index>(i)).transpose(); }

  std::size_t count(int label) const {
    std::size_t c = 0;
    for (int y : labels) c += (y == label);
    return c;
  }

  void validate() const {
    if (labels.empty()) throw std::invalid_argument("dataset: no examples");
    if (static_cast<std::size_t>(features.rows()) != labels.size())
      throw std::invalid_argument("dataset: feature rows and labels differ in count");
    if (features.cols() < 1) throw std::invalid_argument("dataset: no feature columns");
    for (int y : labels)
      if (y != 1 && y != -1) throw std::invalid_argument("dataset: labels must be -1 or +1");
    if (strategic_mask.size() != d()) throw std::invalid_argument("dataset: mask length must equal d");
    if (!features.allFinite()) throw std::invalid_argument("dataset: non-finite feature value");
  }
};

inline std::vector<bool> first_k_mask(std::size_t d, std::size_t k) {
  std::vector<bool> mask(d, false);
  for (std::size_t j = 0; j < std::min(k, d); ++j) mask[j] = true;
  return mask;
}

inline Vector mask_vector(const std::vector<bool>& mask) {
  Vector m(static_cast<Eigen::Index>(mask.size()));
  for (std::size_t j = 0; j < mask.size(); ++j) m[static_cast<Eigen::Index>(j)] = mask[j] ? 1.0 : 0.0;
  return m;
}

/// How agents respond to a deployed classifier. Positive examples never move.
class BestResponseModel {
 public:
  using ResponseFn = std::function<Vector(const Vector& x, int label, const Vector& theta)>;

  /// Utility ((1-y)/2)<x, theta> - |x - x0|^2 / (2 zeta) over masked coordinates:
  /// the maximizer is x0 + zeta * theta on the mask.
  static BestResponseModel quadratic(double zeta, std::vector<bool> mask) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) throw std::invalid_argument("quadratic cost: zeta must be positive");
    BestResponseModel m;
    m.zeta_ = zeta;
    m.mask_ = mask_vector(mask);
    return m;
  }

  static BestResponseModel custom(ResponseFn fn) {
    if (!fn) throw std::invalid_argument("custom response: empty function");
    BestResponseModel m;
    m.custom_ = std::move(fn);
    return m;
  }

  bool is_quadratic() const { return !custom_; }
  double zeta() const { return zeta_; }
  const Vector& mask() const { return mask_; }

  Vector respond(const Vector& x, int label, const Vector& theta) const {
    if (label == 1) return x;
    if (custom_) return custom_(x, label, theta);
    return x + zeta_ * mask_.cwiseProduct(theta);
  }

  Vector respond(const StrategicDataset& data, std::size_t i, const Vector& theta) const {
    return respond(data.x(i), data.labels[i], theta);
  }

  /// Same model with a different movement budget (evaluation under shifted zeta).
  BestResponseModel with_zeta(double zeta) const {
    if (custom_) throw UnsupportedMode("with_zeta: custom response model");
    return quadratic(zeta, mask_bools());
  }

 private:
  std::vector<bool> mask_bools() const {
    std::vector<bool> b(static_cast<std::size_t>(mask_.size()));
    for (Eigen::Index j = 0; j < mask_.size(); ++j) b[static_cast<std::size_t>(j)] = mask_[j] != 0.0;
    return b;
  }

  double zeta_ = 0.0;
  Vector mask_;
  ResponseFn custom_;
};

/// Agent utility under the quadratic movement cost.
inline double quadratic_utility(const Vector& x, const Vector& x0, int label, const Vector& theta, double zeta) {
  return 0.5 * (1.0 - label) * x.dot(theta) - (x - x0).squaredNorm() / (2.0 * zeta);
}

/// Generalized-linear link phi with its first derivative and smoothness bound.
struct GlmLink {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  double beta;  // sup phi''

  /// phi(z) = log(1 + e^z) - z/2 = |z|/2 + log1p(e^-|z|), beta = 1/4.
  static GlmLink logistic() {
    return {"logistic",
            [](double z) { return 0.5 * std::abs(z) + std::log1p(std::exp(-std::abs(z))); },
            [](double z) { return 0.5 * std::tanh(0.5 * z); }, 0.25};
  }

  static GlmLink by_name(const std::string& name) {
    if (name == "logistic") return logistic();
    throw std::invalid_argument("unknown link '" + name + "'");
  }
};

inline double default_alpha_max(const GlmLink& link, double theta_scale = 1.0) {
  return 10.0 * (link.beta + 1.0) * theta_scale;
}

struct WdrscParams {
  double delta = 0.4;
  double kappa = 0.5;
  double alpha_max = 12.5;
};

class WdrscObjective : public FiniteSumOracle {
 public:
  WdrscObjective(std::shared_ptr<const StrategicDataset> data, BestResponseModel model, GlmLink link,
                 WdrscParams params)
      : data_(std::move(data)), model_(std::move(model)), link_(std::move(link)), params_(params) {
    data_->validate();
    if (!(params_.delta > 0.0)) throw std::invalid_argument("objective: delta must be positive");
    if (!(params_.kappa > 0.0)) throw std::invalid_argument("objective: kappa must be positive");
    if (!(params_.alpha_max > 0.0)) throw std::invalid_argument("objective: alpha_max must be positive");
    slot_.assign(data_->n(), -1);
    for (std::size_t i = 0; i < data_->n(); ++i)
      if (data_->labels[i] == 1) slot_[i] = static_cast<Eigen::Index>(positives_++);
    if (positives_ == 0)
      throw std::invalid_argument("empty max block: no positive examples, the problem is a pure minimization");
    d_ = data_->d();
    set_theta_access(model_.is_quadratic());
  }

  // FiniteSumOracle
  std::size_t size() const override { return data_->n(); }
  std::size_t dim() const override { return d_ + 1 + positives_; }
  const std::vector<Block>& blocks() const override { return blocks_; }

  double component(std::size_t i, const Vector& u) const override {
    const Vector theta = u.head(static_cast<Eigen::Index>(d_));
    const double alpha = u[static_cast<Eigen::Index>(d_)];
    const double m = response_inner_product(i, theta);
    double value = alpha * (params_.delta - params_.kappa) + link_.phi(m);
    if (data_->labels[i] == 1) {
      value += gamma_of(i, u) * (m - alpha * params_.kappa);
    } else {
      value += m;
    }
    if (!std::isfinite(value)) throw NumericalFailure("WDRSC component loss is not finite");
    return value;
  }

  Vector partial_gradient(std::size_t b, std::size_t i, const Vector& u) const override {
    Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
    fill_partials(i, u, g, b == 0, b == 1, b == 2);
    const auto& blk = blocks_.at(b);
    return g.segment(static_cast<Eigen::Index>(blk.offset), static_cast<Eigen::Index>(blk.size));
  }

  void analytic_partials(std::size_t i, const Vector& u, Vector& grad) const override {
    fill_partials(i, u, grad, blocks_[0].analytic, true, true);
  }

  /// <b_i(theta), theta> through the response model (one response query).
  double response_inner_product(std::size_t i, const Vector& theta) const {
    return model_.respond(*data_, i, theta).dot(theta);
  }

  const StrategicDataset& dataset() const { return *data_; }
  std::shared_ptr<const StrategicDataset> dataset_ptr() const { return data_; }
  const BestResponseModel& model() const { return model_; }
  const GlmLink& link() const { return link_; }
  const WdrscParams& params() const { return params_; }
  std::size_t theta_dim() const { return d_; }
  std::size_t gamma_dim() const { return positives_; }
  double soc_scale() const { return 1.0 / (link_.beta + 1.0); }

  /// gamma coordinate of example i, or -1 for negative examples.
  Eigen::Index gamma_slot(std::size_t i) const { return slot_[i]; }

  FeasibleSet constraint_set() const {
    return FeasibleSet::product(
        {FeasibleSet::capped_soc(d_, soc_scale(), params_.alpha_max), FeasibleSet::box(positives_, -1.0, 1.0)});
  }

  /// Copy whose theta block is exact (needs the quadratic model) or query-only.
  WdrscObjective with_exact_theta(bool exact) const {
    WdrscObjective copy = *this;
    copy.set_theta_access(exact);
    return copy;
  }

  Vector theta(const Vector& u) const { return u.head(static_cast<Eigen::Index>(d_)); }
  double alpha(const Vector& u) const { return u[static_cast<Eigen::Index>(d_)]; }
  Vector gamma(const Vector& u) const { return u.tail(static_cast<Eigen::Index>(positives_)); }

 private:
  void set_theta_access(bool exact) {
    if (exact && !model_.is_quadratic())
      throw UnsupportedMode("exact theta gradient needs the quadratic response model");
    const auto d = d_;
    blocks_ = {{"theta", 0, d, Player::minimize, exact},
               {"alpha", d, 1, Player::minimize, true},
               {"gamma", d + 1, positives_, Player::maximize, true}};
  }

  double gamma_of(std::size_t i, const Vector& u) const {
    return u[static_cast<Eigen::Index>(d_ + 1) + slot_[i]];
  }

  void fill_partials(std::size_t i, const Vector& u, Vector& g, bool want_theta, bool want_alpha,
                     bool want_gamma) const {
    if (want_theta && !model_.is_quadratic())
      throw UnsupportedMode("exact theta gradient needs the quadratic response model");
    const auto d = static_cast<Eigen::Index>(d_);
    const Vector theta = u.head(d);
    const double alpha = u[d];
    const Vector x = data_->x(i);
    const bool positive = data_->labels[i] == 1;
    const double m = response_inner_product(i, theta);
    const double dphi = link_.dphi(m);

    if (want_theta) {
      if (positive) {
        g.head(d) = (dphi + gamma_of(i, u)) * x;
      } else {
        g.head(d) = (dphi + 1.0) * (x + 2.0 * model_.zeta() * model_.mask().cwiseProduct(theta));
      }
    }
    if (want_alpha)
      g[d] = (params_.delta - params_.kappa) - (positive ? gamma_of(i, u) * params_.kappa : 0.0);
    if (want_gamma) {
      g.tail(static_cast<Eigen::Index>(positives_)).setZero();
      if (positive) g[d + 1 + slot_[i]] = m - alpha * params_.kappa;
    }
  }

  std::shared_ptr<const StrategicDataset> data_;
  BestResponseModel model_;
  GlmLink link_;
  WdrscParams params_;
  std::size_t d_ = 0;
  std::size_t positives_ = 0;
  std::vector<Eigen::Index> slot_;
  std::vector<Block> blocks_;
};

inline WdrscObjective build_objective(std::shared_ptr<const StrategicDataset> data, BestResponseModel model,
                                      GlmLink link, WdrscParams params) {
  return WdrscObjective(std::move(data), std::move(model), std::move(link), params);
}

inline Vector best_response(const WdrscObjective& obj, std::size_t i, const Vector& theta) {
  if (static_cast<std::size_t>(theta.size()) != obj.theta_dim())
    throw std::invalid_argument("best_response: theta has wrong dimension");
  return obj.model().respond(obj.dataset(), i, theta);
}

}  // namespace zominmax
