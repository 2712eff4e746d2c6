#pragma once

// Histogram gradient-boosted trees for binary classification (logistic loss).
//
// Features are binned once into at most max_bins bins per column; trees grow
// best-first up to max_leaf_nodes leaves. A child histogram is built by
// scanning the smaller child and subtracting from the parent for the larger.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

#include "mmalign/error.hpp"

namespace mmalign::onset {

/// Row-major dense matrix of features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

struct GbdtConfig {
  int max_bins = 256;
  int max_iter = 100;
  double learning_rate = 0.1;
  int max_leaf_nodes = 31;
  int min_samples_leaf = 20;
  double l2_regularization = 0.0;
  double min_hessian_leaf = 1e-3;
  /// Worker threads for histogram building; results do not depend on it.
  int jobs = 1;
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Per-feature bin edges. A value x falls in bin lower_bound(edges, x), so
/// bin b holds edges[b-1] < x <= edges[b]. Non-finite values go to bin 0.
class BinMapper {
 public:
  BinMapper() = default;

  static BinMapper fit(const Matrix& x, int max_bins) {
    if (max_bins < 2 || max_bins > 256) throw InvariantError("max_bins must be in [2, 256]");
    BinMapper m;
    m.edges_.resize(x.cols);
    std::vector<double> col;
    for (std::size_t j = 0; j < x.cols; ++j) {
      col.clear();
      for (std::size_t i = 0; i < x.rows; ++i) {
        if (std::isfinite(x(i, j))) col.push_back(x(i, j));
      }
      std::sort(col.begin(), col.end());
      std::vector<double> distinct = col;
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      auto& edges = m.edges_[j];
      if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
        for (std::size_t k = 0; k + 1 < distinct.size(); ++k) edges.push_back((distinct[k] + distinct[k + 1]) / 2.0);
      } else {
        // Quantile edges on the full sample; duplicates collapse.
        for (int b = 1; b < max_bins; ++b) {
          const auto pos = static_cast<std::size_t>(static_cast<double>(b) * static_cast<double>(col.size()) /
                                                    static_cast<double>(max_bins));
          const double e = col[std::min(pos, col.size() - 1)];
          if (edges.empty() || e > edges.back()) edges.push_back(e);
        }
        if (!edges.empty() && edges.back() >= col.back()) edges.pop_back();
      }
    }
    return m;
  }

  std::size_t features() const noexcept { return edges_.size(); }
  std::size_t bins(std::size_t feature) const { return edges_[feature].size() + 1; }
  const std::vector<double>& edges(std::size_t feature) const { return edges_[feature]; }

  std::uint8_t bin(std::size_t feature, double v) const {
    if (!std::isfinite(v)) return 0;
    const auto& e = edges_[feature];
    return static_cast<std::uint8_t>(std::lower_bound(e.begin(), e.end(), v) - e.begin());
  }

 private:
  std::vector<std::vector<double>> edges_;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x <= threshold
  int bin = 0;  // left holds bins <= bin
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate
  double gain = 0.0;
  std::size_t count = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      const double v = x[static_cast<std::size_t>(n.feature)];
      // Non-finite values were binned to 0, the leftmost bin.
      i = (!std::isfinite(v) || v <= n.threshold) ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }

  std::size_t leaves() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
  }
};

namespace detail {

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  std::size_t n = 0;
};

/// Histograms for all features of one node, flattened with per-feature offsets.
using Histogram = std::vector<HistBin>;

struct SplitInfo {
  bool valid = false;
  double gain = 0.0;
  int feature = -1;
  int bin = 0;
};

struct GrowNode {
  int tree_index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double g = 0.0;
  double h = 0.0;
  Histogram hist;
  SplitInfo split;
};

class TreeGrower {
 public:
  TreeGrower(const BinMapper& mapper, const std::vector<std::uint8_t>& binned, std::size_t n_rows,
             const GbdtConfig& cfg)
      : mapper_(mapper), binned_(binned), n_rows_(n_rows), cfg_(cfg) {
    offsets_.resize(mapper.features() + 1, 0);
    for (std::size_t f = 0; f < mapper.features(); ++f) offsets_[f + 1] = offsets_[f] + mapper.bins(f);
  }

  /// Grows one tree on gradients/hessians; fills `row_value` with each row's
  /// leaf output so the caller can update raw predictions.
  Tree grow(const std::vector<double>& grad, const std::vector<double>& hess, std::vector<double>& row_value) {
    index_.resize(n_rows_);
    std::iota(index_.begin(), index_.end(), std::uint32_t{0});

    Tree tree;
    std::vector<GrowNode> open;  // leaves of the current tree, indexed via heap entries
    GrowNode root;
    root.begin = 0;
    root.end = n_rows_;
    for (std::size_t i = 0; i < n_rows_; ++i) {
      root.g += grad[i];
      root.h += hess[i];
    }
    root.hist = build_histogram(root.begin, root.end, grad, hess);
    tree.nodes.push_back(TreeNode{});
    tree.nodes[0].count = n_rows_;
    root.tree_index = 0;
    root.split = best_split(root);
    open.push_back(std::move(root));

    // Max-heap on gain; ties go to the earlier-created node.
    auto cmp = [&](std::size_t a, std::size_t b) {
      if (open[a].split.gain != open[b].split.gain) return open[a].split.gain < open[b].split.gain;
      return open[a].tree_index > open[b].tree_index;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    std::vector<std::size_t> leaves_done;
    if (open[0].split.valid) {
      heap.push(0);
    } else {
      leaves_done.push_back(0);
    }

    std::size_t n_leaves = 1;
    while (!heap.empty() && n_leaves < static_cast<std::size_t>(cfg_.max_leaf_nodes)) {
      const std::size_t k = heap.top();
      heap.pop();
      GrowNode parent = std::move(open[k]);
      open[k].hist.clear();
      open[k].hist.shrink_to_fit();

      const auto f = static_cast<std::size_t>(parent.split.feature);
      const auto split_bin = static_cast<std::uint8_t>(parent.split.bin);
      const std::uint8_t* col = binned_.data() + f * n_rows_;
      auto mid_it = std::stable_partition(index_.begin() + static_cast<std::ptrdiff_t>(parent.begin),
                                          index_.begin() + static_cast<std::ptrdiff_t>(parent.end),
                                          [&](std::uint32_t r) { return col[r] <= split_bin; });
      const auto mid = static_cast<std::size_t>(mid_it - index_.begin());

      GrowNode left, right;
      left.begin = parent.begin;
      left.end = mid;
      right.begin = mid;
      right.end = parent.end;
      for (std::size_t i = left.begin; i < left.end; ++i) {
        left.g += grad[index_[i]];
        left.h += hess[index_[i]];
      }
      for (std::size_t i = right.begin; i < right.end; ++i) {
        right.g += grad[index_[i]];
        right.h += hess[index_[i]];
      }

      const bool left_small = (left.end - left.begin) <= (right.end - right.begin);
      GrowNode& small = left_small ? left : right;
      GrowNode& large = left_small ? right : left;
      small.hist = build_histogram(small.begin, small.end, grad, hess);
      large.hist = std::move(parent.hist);
      for (std::size_t b = 0; b < large.hist.size(); ++b) {
        large.hist[b].g -= small.hist[b].g;
        large.hist[b].h -= small.hist[b].h;
        large.hist[b].n -= small.hist[b].n;
      }

      auto& pnode = tree.nodes[static_cast<std::size_t>(parent.tree_index)];
      pnode.feature = parent.split.feature;
      pnode.bin = parent.split.bin;
      pnode.threshold = mapper_.edges(f)[static_cast<std::size_t>(parent.split.bin)];
      pnode.gain = parent.split.gain;
      const int li = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{});
      tree.nodes.back().count = left.end - left.begin;
      const int ri = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{});
      tree.nodes.back().count = right.end - right.begin;
      tree.nodes[static_cast<std::size_t>(parent.tree_index)].left = li;
      tree.nodes[static_cast<std::size_t>(parent.tree_index)].right = ri;
      left.tree_index = li;
      right.tree_index = ri;
      ++n_leaves;

      for (GrowNode* child : {&left, &right}) {
        child->split = best_split(*child);
        open.push_back(std::move(*child));
        const std::size_t id = open.size() - 1;
        if (open[id].split.valid) {
          heap.push(id);
        } else {
          open[id].hist.clear();
          leaves_done.push_back(id);
        }
      }
    }
    while (!heap.empty()) {
      leaves_done.push_back(heap.top());
      heap.pop();
    }

    for (std::size_t id : leaves_done) {
      const auto& node = open[id];
      const double v = -cfg_.learning_rate * node.g / (node.h + cfg_.l2_regularization);
      tree.nodes[static_cast<std::size_t>(node.tree_index)].value = v;
      for (std::size_t i = node.begin; i < node.end; ++i) row_value[index_[i]] = v;
    }
    return tree;
  }

 private:
  Histogram build_histogram(std::size_t begin, std::size_t end, const std::vector<double>& grad,
                            const std::vector<double>& hess) const {
    Histogram hist(offsets_.back());
    const std::size_t nf = mapper_.features();
    auto fill = [&](std::size_t f_lo, std::size_t f_hi) {
      for (std::size_t f = f_lo; f < f_hi; ++f) {
        const std::uint8_t* col = binned_.data() + f * n_rows_;
        HistBin* h = hist.data() + offsets_[f];
        for (std::size_t i = begin; i < end; ++i) {
          const std::uint32_t r = index_[i];
          auto& b = h[col[r]];
          b.g += grad[r];
          b.h += hess[r];
          ++b.n;
        }
      }
    };
    // Each feature is owned by one worker and summed in row order, so the
    // result is the same for any job count.
    const auto jobs = static_cast<std::size_t>(std::max(1, cfg_.jobs));
    if (jobs == 1 || nf < 2 || end - begin < 1024) {
      fill(0, nf);
    } else {
      std::vector<std::future<void>> tasks;
      const std::size_t chunk = (nf + jobs - 1) / jobs;
      for (std::size_t lo = 0; lo < nf; lo += chunk) {
        tasks.push_back(std::async(std::launch::async, fill, lo, std::min(nf, lo + chunk)));
      }
      for (auto& t : tasks) t.get();
    }
    return hist;
  }

  SplitInfo best_split(const GrowNode& node) const {
    SplitInfo best;
    const std::size_t n = node.end - node.begin;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, cfg_.min_samples_leaf));
    if (n < 2 * min_leaf) return best;
    const double lambda = cfg_.l2_regularization;
    const double parent_score = node.g * node.g / (node.h + lambda);
    for (std::size_t f = 0; f < mapper_.features(); ++f) {
      const HistBin* h = node.hist.data() + offsets_[f];
      const std::size_t nb = mapper_.bins(f);
      double gl = 0.0, hl = 0.0;
      std::size_t nl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += h[b].g;
        hl += h[b].h;
        nl += h[b].n;
        if (nl < min_leaf) continue;
        const std::size_t nr = n - nl;
        if (nr < min_leaf) break;
        const double gr = node.g - gl;
        const double hr = node.h - hl;
        if (hl < cfg_.min_hessian_leaf || hr < cfg_.min_hessian_leaf) continue;
        const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score;
        if (gain > best.gain) {
          best = SplitInfo{true, gain, static_cast<int>(f), static_cast<int>(b)};
        }
      }
    }
    if (best.valid && !(best.gain > 1e-12)) best.valid = false;
    return best;
  }

  const BinMapper& mapper_;
  const std::vector<std::uint8_t>& binned_;
  std::size_t n_rows_;
  const GbdtConfig& cfg_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> index_;
};

}  // namespace detail

class GradientBoostedTrees {
 public:
  GradientBoostedTrees() = default;
  explicit GradientBoostedTrees(GbdtConfig cfg) : cfg_(cfg) {}

  /// Fits on rows of `x` with 0/1 labels and per-row weights (empty: 1 each).
  void fit(const Matrix& x, std::span<const int> y, std::span<const double> weights = {}) {
    if (x.rows != y.size()) throw InvariantError("feature rows and labels differ in length");
    if (!weights.empty() && weights.size() != y.size()) throw InvariantError("weights and labels differ in length");
    if (cfg_.max_iter < 0 || cfg_.max_leaf_nodes < 2 || !(cfg_.learning_rate > 0.0)) {
      throw InvariantError("invalid boosting configuration");
    }
    double wpos = 0.0, wneg = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] != 0 && y[i] != 1) throw InvariantError("labels must be 0 or 1");
      const double w = weights.empty() ? 1.0 : weights[i];
      if (!(w >= 0.0)) throw InvariantError("weights must be non-negative");
      (y[i] == 1 ? wpos : wneg) += w;
    }
    if (!(wpos > 0.0) || !(wneg > 0.0)) throw InvariantError("training set needs both classes");

    n_features_ = x.cols;
    mapper_ = BinMapper::fit(x, cfg_.max_bins);
    std::vector<std::uint8_t> binned(x.rows * x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
      for (std::size_t i = 0; i < x.rows; ++i) binned[f * x.rows + i] = mapper_.bin(f, x(i, f));
    }

    baseline_ = std::log(wpos / wneg);
    trees_.clear();
    std::vector<double> raw(x.rows, baseline_);
    std::vector<double> grad(x.rows), hess(x.rows), step(x.rows);
    detail::TreeGrower grower(mapper_, binned, x.rows, cfg_);
    for (int it = 0; it < cfg_.max_iter; ++it) {
      for (std::size_t i = 0; i < x.rows; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double p = sigmoid(raw[i]);
        grad[i] = w * (p - static_cast<double>(y[i]));
        hess[i] = w * p * (1.0 - p);
      }
      trees_.push_back(grower.grow(grad, hess, step));
      for (std::size_t i = 0; i < x.rows; ++i) raw[i] += step[i];
    }
  }

  double decision_function(std::span<const double> x) const {
    if (x.size() != n_features_) throw InvariantError("feature vector has wrong length");
    double s = baseline_;
    for (const auto& t : trees_) s += t.predict(x);
    return s;
  }

  double predict_proba(std::span<const double> x) const { return sigmoid(decision_function(x)); }

  const std::vector<Tree>& trees() const noexcept { return trees_; }
  double baseline() const noexcept { return baseline_; }
  const GbdtConfig& config() const noexcept { return cfg_; }
  std::size_t n_features() const noexcept { return n_features_; }

 private:
  GbdtConfig cfg_;
  BinMapper mapper_;
  std::vector<Tree> trees_;
  double baseline_ = 0.0;
  std::size_t n_features_ = 0;
};

/// Weights n / (2 n_c) so each class carries half of the total weight.
inline std::vector<double> balanced_weights(std::span<const int> y) {
  const auto n_pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const auto n = static_cast<double>(y.size());
  const double n_neg = n - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw InvariantError("training set needs both classes");
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] == 1 ? n / (2.0 * n_pos) : n / (2.0 * n_neg);
  return w;
}

}  // namespace mmalign::onset
