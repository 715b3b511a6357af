#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "offdetect/classifiers.h"
#include "offdetect/error.h"
#include "offdetect/rng.h"

namespace offdetect {
namespace {

constexpr double kTieEpsilon = 1e-12;

// Unnormalized weighted Gini of one child: w * gini = w - (a^2 + b^2) / w.
double ChildImpurity(double a, double b) {
  const double w = a + b;
  return w > 0.0 ? w - (a * a + b * b) / w : 0.0;
}

double Midpoint(double a, double b) {
  double mid = a + (b - a) * 0.5;
  if (!std::isfinite(mid)) mid = a * 0.5 + b * 0.5;
  // Adjacent doubles: keep `b` on the right-hand side.
  if (mid >= b) mid = a;
  return mid;
}

struct Item {
  uint32_t feature;
  double value;
};

struct Bin {
  double value;
  double w[2];
};

struct Split {
  bool found = false;
  uint32_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;
};

// Uniform k-subset of [0, n) (Floyd), returned sorted.
std::vector<uint32_t> SampleFeatures(size_t n, size_t k, Rng& rng) {
  std::unordered_set<uint32_t> chosen;
  chosen.reserve(k * 2);
  for (size_t j = n - k; j < n; ++j) {
    const auto t = static_cast<uint32_t>(rng.Below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(static_cast<uint32_t>(j));
  }
  std::vector<uint32_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainingSet& data, const TreeOptions& options,
              std::vector<double> weights, Label tie_label, TreeAudit* audit)
      : data_(data),
        options_(options),
        weights_(std::move(weights)),
        tie_label_(tie_label),
        audit_(audit),
        rng_(options.seed) {}

  std::vector<TreeNode> Run(std::vector<uint32_t> samples) {
    Build(std::move(samples), 0);
    return std::move(nodes_);
  }

 private:
  bool Restricted() const {
    return options_.max_features > 0 && options_.max_features < data_.dim();
  }

  int32_t Build(std::vector<uint32_t> samples, int depth) {
    TreeNode node;
    for (uint32_t s : samples) {
      node.class_counts[static_cast<int>(data_.y()[s])] += weights_[s];
    }
    const double c0 = node.class_counts[0], c1 = node.class_counts[1];
    node.label = c1 > c0 ? Label::kOffensive
                 : c0 > c1 ? Label::kNotOffensive
                           : tie_label_;
    const auto index = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(node);

    if (c0 == 0.0 || c1 == 0.0) return index;
    if (options_.max_depth && depth >= *options_.max_depth) return index;

    const Split split = FindSplit(samples, c0, c1, index);
    if (!split.found) return index;

    std::vector<uint32_t> left, right;
    for (uint32_t s : samples) {
      if (data_.x()[s].At(split.feature) <= split.threshold) {
        left.push_back(s);
      } else {
        right.push_back(s);
      }
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[index].feature = static_cast<int32_t>(split.feature);
    nodes_[index].threshold = split.threshold;
    const int32_t l = Build(std::move(left), depth + 1);
    nodes_[index].left = l;
    const int32_t r = Build(std::move(right), depth + 1);
    nodes_[index].right = r;
    return index;
  }

  // Node entries sorted by (feature, value).
  std::vector<Item> Gather(const std::vector<uint32_t>& samples) const {
    std::vector<Item> items;
    for (uint32_t s : samples) {
      for (const auto& e : data_.x()[s].entries()) {
        items.push_back({e.index, e.value});
      }
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return a.feature != b.feature ? a.feature < b.feature : a.value < b.value;
    });
    return items;
  }

  Split FindSplit(const std::vector<uint32_t>& samples, double c0, double c1,
                  int32_t node_index) {
    std::vector<uint32_t> candidates;
    if (Restricted()) {
      candidates = SampleFeatures(data_.dim(), options_.max_features, rng_);
    }

    Split best = Evaluate(samples, c0, c1, Restricted() ? &candidates : nullptr);
    if (Restricted() && !best.found && !any_non_constant_) {
      // No candidate varies in this node: draw one of the varying features
      // instead of giving up on the node.
      std::vector<uint32_t> varying = NonConstantFeatures(samples);
      if (!varying.empty()) {
        const uint32_t extra = varying[rng_.Below(varying.size())];
        candidates.insert(
            std::lower_bound(candidates.begin(), candidates.end(), extra),
            extra);
        best = Evaluate(samples, c0, c1, &candidates);
      }
    }
    if (audit_ != nullptr && Restricted()) {
      audit_->nodes.push_back(
          {node_index, candidates,
           best.found ? static_cast<int32_t>(best.feature) : -1});
    }
    return best;
  }

  // Best split among `only` (all features when null). Sets any_non_constant_.
  Split Evaluate(const std::vector<uint32_t>& samples, double c0, double c1,
                 const std::vector<uint32_t>* only) {
    any_non_constant_ = false;
    const double total = c0 + c1;
    const double parent = ChildImpurity(c0, c1);
    Split best;
    best.impurity = parent;

    // Node entries tagged with their sample's weight and label.
    struct Entry {
      uint32_t feature;
      double value;
      double w;
      int y;
    };
    std::vector<Entry> entries;
    for (uint32_t s : samples) {
      const int y = static_cast<int>(data_.y()[s]);
      for (const auto& e : data_.x()[s].entries()) {
        if (only != nullptr &&
            !std::binary_search(only->begin(), only->end(), e.index)) {
          continue;
        }
        entries.push_back({e.index, e.value, weights_[s], y});
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) {
                return a.feature != b.feature ? a.feature < b.feature
                                              : a.value < b.value;
              });

    std::vector<Bin> bins;
    size_t begin = 0;
    while (begin < entries.size()) {
      const uint32_t f = entries[begin].feature;
      size_t end = begin;
      double nz[2] = {0.0, 0.0};
      bins.clear();
      while (end < entries.size() && entries[end].feature == f) {
        const Entry& e = entries[end];
        if (bins.empty() || bins.back().value != e.value) {
          bins.push_back({e.value, {0.0, 0.0}});
        }
        bins.back().w[e.y] += e.w;
        nz[e.y] += e.w;
        ++end;
      }
      const size_t holders = end - begin;
      if (holders < samples.size()) {
        const Bin zero{0.0, {std::max(0.0, c0 - nz[0]), std::max(0.0, c1 - nz[1])}};
        const auto pos = std::lower_bound(
            bins.begin(), bins.end(), 0.0,
            [](const Bin& b, double v) { return b.value < v; });
        bins.insert(pos, zero);
      }
      begin = end;
      if (bins.size() < 2) continue;
      any_non_constant_ = true;

      double left[2] = {0.0, 0.0};
      for (size_t k = 0; k + 1 < bins.size(); ++k) {
        left[0] += bins[k].w[0];
        left[1] += bins[k].w[1];
        const double impurity =
            ChildImpurity(left[0], left[1]) +
            ChildImpurity(std::max(0.0, c0 - left[0]),
                          std::max(0.0, c1 - left[1]));
        if (impurity < best.impurity - kTieEpsilon * total) {
          best.found = true;
          best.feature = f;
          best.threshold = Midpoint(bins[k].value, bins[k + 1].value);
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  std::vector<uint32_t> NonConstantFeatures(
      const std::vector<uint32_t>& samples) const {
    const std::vector<Item> items = Gather(samples);
    std::vector<uint32_t> out;
    size_t begin = 0;
    while (begin < items.size()) {
      size_t end = begin;
      bool varies = false;
      while (end < items.size() && items[end].feature == items[begin].feature) {
        if (items[end].value != items[begin].value) varies = true;
        ++end;
      }
      if (varies || end - begin < samples.size()) {
        out.push_back(items[begin].feature);
      }
      begin = end;
    }
    return out;
  }

  const TrainingSet& data_;
  const TreeOptions& options_;
  std::vector<double> weights_;
  Label tie_label_;
  TreeAudit* audit_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
  bool any_non_constant_ = false;
};

}  // namespace

double Gini(std::span<const double> class_counts) {
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0.0 || !std::isfinite(c)) {
      throw Error(ErrorKind::kInvalidArgument, "class counts must be >= 0");
    }
    total += c;
  }
  if (total == 0.0) throw Error(ErrorKind::kAllZero, "all class counts are zero");
  double sq = 0.0;
  for (double c : class_counts) sq += (c / total) * (c / total);
  return 1.0 - sq;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, size_t dim,
                           Label majority)
    : nodes_(std::move(nodes)), dim_(dim), majority_(majority) {
  if (nodes_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "tree has no nodes");
  }
  const auto n = static_cast<int32_t>(nodes_.size());
  for (int32_t i = 0; i < n; ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) continue;
    if (static_cast<size_t>(node.feature) >= dim_ || node.left <= i ||
        node.right <= i || node.left >= n || node.right >= n) {
      throw Error(ErrorKind::kInvalidArgument,
                  "malformed tree node " + std::to_string(i));
    }
  }
}

int32_t DecisionTree::LeafIndex(const SparseVector& x) const {
  if (x.dim() != dim_) {
    throw Error(ErrorKind::kDimMismatch,
                "vector dim " + std::to_string(x.dim()) + " vs tree " +
                    std::to_string(dim_));
  }
  int32_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& node = nodes_[i];
    i = x.At(static_cast<uint32_t>(node.feature)) <= node.threshold ? node.left
                                                                     : node.right;
  }
  return i;
}

Prediction DecisionTree::Predict(const SparseVector& x) const {
  const TreeNode& leaf = nodes_[LeafIndex(x)];
  const double total = leaf.class_counts[0] + leaf.class_counts[1];
  const double share = total > 0.0 ? leaf.class_counts[1] / total : 0.0;
  return {leaf.label, share};
}

int DecisionTree::Depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int max_depth = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    max_depth = std::max(max_depth, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return max_depth;
}

DecisionTree TrainTree(const TrainingSet& data, const TreeOptions& options,
                       std::span<const double> sample_weights,
                       TreeAudit* audit) {
  if (options.max_depth && *options.max_depth < 0) {
    throw Error(ErrorKind::kInvalidArgument, "max_depth must be >= 0");
  }
  std::vector<double> weights;
  if (sample_weights.empty()) {
    weights.assign(data.size(), 1.0);
  } else {
    if (sample_weights.size() != data.size()) {
      throw Error(ErrorKind::kLengthMismatch,
                  "sample weights do not match the training set");
    }
    for (double w : sample_weights) {
      if (w < 0.0 || !std::isfinite(w)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "sample weights must be finite and >= 0");
      }
    }
    weights.assign(sample_weights.begin(), sample_weights.end());
  }
  std::vector<uint32_t> samples;
  for (uint32_t i = 0; i < data.size(); ++i) {
    if (weights[i] > 0.0) samples.push_back(i);
  }
  if (samples.empty()) {
    throw Error(ErrorKind::kAllZero, "every sample weight is zero");
  }
  const Label majority = data.counts().Majority();
  const Label tie = options.tie_label.value_or(majority);
  TreeBuilder builder(data, options, std::move(weights), tie, audit);
  return DecisionTree(builder.Run(std::move(samples)), data.dim(), majority);
}

DecisionTree TrainTree(const TrainingSet& data, const TrainConfig& cfg) {
  cfg.Validate();
  TreeOptions options;
  options.max_depth = cfg.max_depth;
  options.seed = cfg.seed;
  return TrainTree(data, options);
}

}  // namespace offdetect
