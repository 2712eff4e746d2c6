#pragma once

// Principal component projection for text embeddings.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mmalign/error.hpp"

namespace mmalign::onset {

class Pca {
 public:
  Pca() = default;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  /// Number of components actually kept (may be below the requested k).
  std::size_t components() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  /// One component per row, unit length.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  const std::vector<double>& explained_variance() const noexcept { return variance_; }

  std::vector<double> transform(std::span<const double> x) const {
    if (x.size() != input_dim()) throw InvariantError("pca input has wrong dimension");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd z = basis_ * (v - mean_);
    return {z.data(), z.data() + z.size()};
  }

  /// Projection padded with zeros up to `width` (used when k was reduced).
  std::vector<double> transform_padded(std::span<const double> x, std::size_t width) const {
    auto z = transform(x);
    z.resize(std::max(width, z.size()), 0.0);
    return z;
  }

  std::vector<double> inverse_transform(std::span<const double> z) const {
    if (z.size() != components()) throw InvariantError("pca code has wrong dimension");
    const Eigen::Map<const Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::VectorXd x = mean_ + basis_.transpose() * v;
    return {x.data(), x.data() + x.size()};
  }

 private:
  friend Pca fit_pca(std::span<const std::vector<double>>, std::span<const double>, std::size_t, Warnings*);

  Eigen::VectorXd mean_;
  Eigen::MatrixXd basis_;
  std::vector<double> variance_;
};

/// Fits the top-k principal components of the rows, where row i counts
/// `weights[i]` times (frequency weights; empty means 1 each). The covariance
/// uses the n - 1 denominator over the total weight. Components whose
/// eigenvalue is negligible relative to the largest are dropped with a warning.
inline Pca fit_pca(std::span<const std::vector<double>> rows, std::span<const double> weights, std::size_t k,
                   Warnings* warnings = nullptr) {
  if (k == 0) throw InvariantError("pca needs k > 0");
  if (rows.empty()) throw InvariantError("pca needs at least one training vector");
  if (!weights.empty() && weights.size() != rows.size()) throw InvariantError("pca weights differ in length");
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  if (d == 0) throw InvariantError("pca input is empty");

  double total = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != d) throw InvariantError("pca rows differ in dimension");
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0)) throw InvariantError("pca weights must be non-negative");
    mean += w * Eigen::Map<const Eigen::VectorXd>(rows[i].data(), d);
    total += w;
  }
  if (!(total > 1.0)) throw InvariantError("pca needs a total weight above 1");
  mean /= total;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0) continue;
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(rows[i].data(), d) - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c, w);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= (total - 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::internal, "pca eigendecomposition failed");
  const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vecs = solver.eigenvectors();

  const double top = vals(d - 1);
  const double floor = std::max(top, 0.0) * 1e-10;
  std::size_t rank = 0;
  for (Eigen::Index i = d - 1; i >= 0 && vals(i) > floor; --i) ++rank;
  std::size_t kept = std::min(k, rank);
  if (kept < k && warnings) {
    warnings->add("pca: requested " + std::to_string(k) + " components but data has rank " + std::to_string(rank) +
                  "; keeping " + std::to_string(kept));
  }
  if (kept == 0) throw InvariantError("pca training data has no variance");

  Pca p;
  p.mean_ = mean;
  p.basis_.resize(static_cast<Eigen::Index>(kept), d);
  for (std::size_t c = 0; c < kept; ++c) {
    const Eigen::Index src = d - 1 - static_cast<Eigen::Index>(c);
    Eigen::VectorXd v = vecs.col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    }
    if (v(arg) < 0.0) v = -v;
    p.basis_.row(static_cast<Eigen::Index>(c)) = v.transpose();
    p.variance_.push_back(vals(src));
  }
  return p;
}

inline Pca fit_pca(std::span<const std::vector<double>> rows, std::size_t k, Warnings* warnings = nullptr) {
  return fit_pca(rows, {}, k, warnings);
}

}  // namespace mmalign::onset
