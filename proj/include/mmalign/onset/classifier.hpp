#pragma once

// Common interface over the boosted-tree model and a logistic-regression
// baseline, plus JSON serialization of trained models.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/onset/gbdt.hpp"
#include "mmalign/show_json.hpp"

namespace mmalign::onset {

/// L2-regularised logistic regression on standardised features, fitted by
/// Newton iterations.
class LogisticRegression {
 public:
  explicit LogisticRegression(double l2 = 1.0, int max_iter = 100) : l2_(l2), max_iter_(max_iter) {}

  void fit(const Matrix& x, std::span<const int> y, std::span<const double> weights = {}) {
    if (x.rows != y.size()) throw InvariantError("feature rows and labels differ in length");
    const auto n = static_cast<Eigen::Index>(x.rows);
    const auto d = static_cast<Eigen::Index>(x.cols);
    mean_ = Eigen::VectorXd::Zero(d);
    scale_ = Eigen::VectorXd::Ones(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) s += x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const double m = n > 0 ? s / static_cast<double>(n) : 0.0;
      double v = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double c = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - m;
        v += c * c;
      }
      const double sd = n > 0 ? std::sqrt(v / static_cast<double>(n)) : 0.0;
      mean_(j) = m;
      scale_(j) = sd > 1e-12 ? sd : 1.0;
    }

    Eigen::MatrixXd z(n, d + 1);
    Eigen::VectorXd w(n), t(n);
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      z(i, 0) = 1.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        z(i, j + 1) = (x(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - mean_(j)) / scale_(j);
      }
      const int yi = y[static_cast<std::size_t>(i)];
      if (yi != 0 && yi != 1) throw InvariantError("labels must be 0 or 1");
      (yi == 1 ? has_pos : has_neg) = true;
      t(i) = yi;
      w(i) = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    }
    if (!has_pos || !has_neg) throw InvariantError("training set needs both classes");

    beta_ = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, l2_);
    penalty(0) = 0.0;
    for (int it = 0; it < max_iter_; ++it) {
      const Eigen::VectorXd eta = z * beta_;
      Eigen::VectorXd p(n), r(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        p(i) = sigmoid(eta(i));
        r(i) = w(i) * p(i) * (1.0 - p(i));
      }
      const Eigen::VectorXd grad = z.transpose() * (w.cwiseProduct(p - t)) + penalty.cwiseProduct(beta_);
      Eigen::MatrixXd hess = z.transpose() * r.asDiagonal() * z;
      hess.diagonal() += penalty;
      hess.diagonal().array() += 1e-10;
      const Eigen::VectorXd delta = hess.ldlt().solve(grad);
      beta_ -= delta;
      if (delta.lpNorm<Eigen::Infinity>() < 1e-10) break;
    }
  }

  double decision_function(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) + 1 != beta_.size()) throw InvariantError("feature vector has wrong length");
    double s = beta_(0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      s += beta_(jj + 1) * (x[j] - mean_(jj)) / scale_(jj);
    }
    return s;
  }

  double predict_proba(std::span<const double> x) const { return sigmoid(decision_function(x)); }

  const Eigen::VectorXd& coefficients() const noexcept { return beta_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::VectorXd& scale() const noexcept { return scale_; }

 private:
  double l2_;
  int max_iter_;
  Eigen::VectorXd mean_, scale_, beta_;
};

enum class ClassifierKind { gbdt, logistic };

inline std::string to_string(ClassifierKind k) { return k == ClassifierKind::gbdt ? "gbdt" : "logistic"; }

inline ClassifierKind parse_classifier_kind(const std::string& s) {
  if (s == "gbdt") return ClassifierKind::gbdt;
  if (s == "logistic") return ClassifierKind::logistic;
  throw InputError("unknown classifier '" + s + "' (expected gbdt or logistic)");
}

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::gbdt;
  GbdtConfig gbdt;
  double logistic_l2 = 1.0;
  bool balanced = true;
};

/// A trained scorer; score() is in [0, 1].
class Classifier {
 public:
  double score(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
  }

  std::vector<double> score_all(const Matrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = score(x.row(i));
    return out;
  }

  ClassifierKind kind() const noexcept {
    return std::holds_alternative<GradientBoostedTrees>(model_) ? ClassifierKind::gbdt : ClassifierKind::logistic;
  }
  const GradientBoostedTrees* trees() const { return std::get_if<GradientBoostedTrees>(&model_); }
  const LogisticRegression* logistic() const { return std::get_if<LogisticRegression>(&model_); }

 private:
  friend Classifier train_classifier(const Matrix&, std::span<const int>, const ClassifierConfig&);
  std::variant<GradientBoostedTrees, LogisticRegression> model_;
};

inline Classifier train_classifier(const Matrix& x, std::span<const int> y, const ClassifierConfig& cfg) {
  std::vector<double> w;
  if (cfg.balanced) {
    w = balanced_weights(y);
  } else {
    w.assign(y.size(), 1.0);
  }
  Classifier c;
  if (cfg.kind == ClassifierKind::gbdt) {
    GradientBoostedTrees m(cfg.gbdt);
    m.fit(x, y, w);
    c.model_ = std::move(m);
  } else {
    LogisticRegression m(cfg.logistic_l2);
    m.fit(x, y, w);
    c.model_ = std::move(m);
  }
  return c;
}

namespace detail {

/// Leaf: [value]. Split: [feature, threshold, left, right].
inline Json tree_node_json(const Tree& t, int i) {
  const auto& n = t.nodes[static_cast<std::size_t>(i)];
  if (n.feature < 0) return Json::array({n.value});
  return Json::array({n.feature, n.threshold, tree_node_json(t, n.left), tree_node_json(t, n.right)});
}

}  // namespace detail

inline Json to_json(const Classifier& c, const std::vector<std::string>& feature_names) {
  Json j = Json::object();
  j["type"] = to_string(c.kind());
  j["feature_names"] = feature_names;
  if (const auto* g = c.trees()) {
    const auto& cfg = g->config();
    j["params"] = Json{{"max_bins", cfg.max_bins},
                       {"max_iter", cfg.max_iter},
                       {"learning_rate", cfg.learning_rate},
                       {"max_leaf_nodes", cfg.max_leaf_nodes},
                       {"min_samples_leaf", cfg.min_samples_leaf},
                       {"l2_regularization", cfg.l2_regularization}};
    j["baseline"] = g->baseline();
    Json trees = Json::array();
    for (const auto& t : g->trees()) trees.push_back(detail::tree_node_json(t, 0));
    j["trees"] = std::move(trees);
  } else if (const auto* l = c.logistic()) {
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    j["intercept"] = l->coefficients()(0);
    j["coefficients"] = std::vector<double>(l->coefficients().data() + 1,
                                            l->coefficients().data() + l->coefficients().size());
    j["feature_mean"] = vec(l->mean());
    j["feature_scale"] = vec(l->scale());
  }
  return j;
}

}  // namespace mmalign::onset
