#ifndef OFFDETECT_CLASSIFIERS_H_
#define OFFDETECT_CLASSIFIERS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "offdetect/corpus.h"
#include "offdetect/sparse.h"

namespace offdetect {

enum class ModelKind {
  kLogReg,
  kSvm,
  kDecisionTree,
  kBagging,
  kRandomForest,
  kAdaBoost,
};

constexpr std::array<ModelKind, 6> kAllModelKinds = {
    ModelKind::kSvm,     ModelKind::kLogReg,       ModelKind::kDecisionTree,
    ModelKind::kBagging, ModelKind::kRandomForest, ModelKind::kAdaBoost};

// logreg, svm, dtree, bagging, rforest, adaboost
std::string_view ModelKindName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);
bool IsEnsembleKind(ModelKind kind);

struct TrainConfig {
  double l2_lambda = 1e-4;
  // Initial step for the linear models; AdaBoost uses it as shrinkage.
  double learning_rate = 10.0;
  int max_epochs = 1000;
  double tolerance = 1e-6;
  std::optional<int> max_depth;
  int n_estimators = 50;
  uint64_t seed = 20200511;
  // Bagging / random forest resample with replacement when set.
  bool bootstrap = true;
  // Random forest per-node candidate count; ceil(sqrt(d)) when unset.
  std::optional<size_t> max_features;
  // Loss weight of the Offensive class for the linear models.
  double positive_class_weight = 1.0;

  // Per-kind defaults: 50 estimators for bagging and AdaBoost (the latter
  // with learning rate 1), 100 trees for the forest.
  static TrainConfig Defaults(ModelKind kind);
  void Validate() const;
};

struct Prediction {
  Label label;
  double score;
};

// Checked pairing of feature vectors and labels.
class TrainingSet {
 public:
  // Throws LengthMismatch on size mismatch, DimMismatch when vector dims
  // differ, EmptyDataset when empty.
  TrainingSet(std::span<const SparseVector> x, std::span<const Label> y);

  std::span<const SparseVector> x() const { return x_; }
  std::span<const Label> y() const { return y_; }
  size_t size() const { return x_.size(); }
  size_t dim() const { return dim_; }
  const ClassCounts& counts() const { return counts_; }
  // Throws SingleClass unless both classes occur.
  void RequireBothClasses() const;

 private:
  std::span<const SparseVector> x_;
  std::span<const Label> y_;
  size_t dim_ = 0;
  ClassCounts counts_;
};

// +1 for Offensive, -1 for NotOffensive.
inline double Sign(Label l) { return l == Label::kOffensive ? 1.0 : -1.0; }

// Decision rule shared by every scored model: positive score is Offensive,
// negative NotOffensive, exact zero falls back to `majority`.
inline Label LabelFromScore(double score, Label majority) {
  if (score > 0.0) return Label::kOffensive;
  if (score < 0.0) return Label::kNotOffensive;
  return majority;
}

// ---------------------------------------------------------------------------
// Linear models.

enum class LinearKind { kLogistic, kHingeSvm };

struct LinearModel {
  LinearKind kind = LinearKind::kLogistic;
  std::vector<double> weights;
  double bias = 0.0;
  Label majority = Label::kNotOffensive;
  int epochs = 0;

  // score = w.x + b. Throws DimMismatch.
  Prediction Predict(const SparseVector& x) const;
};

// Regularized objective at (w, b); optionally fills the gradient.
struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

ObjectiveValue LogisticObjective(const TrainingSet& data,
                                 std::span<const double> w, double b,
                                 double l2_lambda, bool with_gradient,
                                 double positive_class_weight = 1.0);
// Uses the subgradient -t*x for margins below 1.
ObjectiveValue HingeObjective(const TrainingSet& data, std::span<const double> w,
                              double b, double l2_lambda, bool with_gradient,
                              double positive_class_weight = 1.0);

// Objective after each accepted epoch, starting with the initial point.
using ObjectiveTrace = std::vector<double>;

// Full-batch gradient descent on mean logistic loss + (l2/2)|w|^2 with a
// fixed step that is halved whenever it would increase the objective.
LinearModel TrainLogReg(const TrainingSet& data, const TrainConfig& cfg,
                        ObjectiveTrace* trace = nullptr);
// Subgradient descent on mean hinge loss + (l2/2)|w|^2 with step
// learning_rate / (1 + epoch); steps that raise the objective are halved.
LinearModel TrainSvm(const TrainingSet& data, const TrainConfig& cfg,
                     ObjectiveTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Decision trees.

// 1 - sum p_i^2. Throws AllZero when every count is zero.
double Gini(std::span<const double> class_counts);

struct TreeNode {
  int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int32_t left = -1;     // x[feature] <= threshold
  int32_t right = -1;
  // Indexed by Label (NotOffensive, Offensive); weighted.
  std::array<double, 2> class_counts = {0.0, 0.0};
  Label label = Label::kNotOffensive;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, size_t dim, Label majority);

  // Score is the Offensive share of the leaf's weighted counts.
  Prediction Predict(const SparseVector& x) const;
  int32_t LeafIndex(const SparseVector& x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  size_t dim() const { return dim_; }
  Label majority() const { return majority_; }
  int Depth() const;

 private:
  std::vector<TreeNode> nodes_;
  size_t dim_ = 0;
  Label majority_ = Label::kNotOffensive;
};

// Per-node record of the random feature subset a split was chosen from.
struct TreeAudit {
  struct Node {
    int32_t node = -1;
    std::vector<uint32_t> candidates;  // sorted
    int32_t chosen = -1;               // -1 when the node became a leaf
  };
  std::vector<Node> nodes;
};

struct TreeOptions {
  std::optional<int> max_depth;
  // 0 searches every feature.
  size_t max_features = 0;
  uint64_t seed = 0;
  // Label used for leaf ties; defaults to the training majority.
  std::optional<Label> tie_label;
};

// Gini / best-splitter CART. `sample_weights` may be empty (all ones);
// samples with zero weight are ignored.
DecisionTree TrainTree(const TrainingSet& data, const TreeOptions& options,
                       std::span<const double> sample_weights = {},
                       TreeAudit* audit = nullptr);
DecisionTree TrainTree(const TrainingSet& data, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Ensembles.

enum class EnsembleKind { kBagging, kRandomForest, kAdaBoost };
enum class Combiner { kMajorityVote, kWeightedSum };

struct Ensemble {
  EnsembleKind kind = EnsembleKind::kBagging;
  std::vector<DecisionTree> members;
  std::vector<double> member_weights;
  Combiner combiner = Combiner::kMajorityVote;
  Label majority = Label::kNotOffensive;
  size_t dim = 0;

  // Majority vote: score is the winning label's vote share. Weighted sum:
  // score is sum alpha_m * h_m(x) with h in {-1, +1}. Throws EmptyEnsemble.
  Prediction Predict(const SparseVector& x) const;
  // Member votes indexed by Label.
  std::array<size_t, 2> Votes(const SparseVector& x) const;
};

struct BoostingRound {
  double error = 0.0;
  double alpha = 0.0;
  bool kept = false;
  // Totals after the reweighting of this round.
  double weight_sum = 0.0;
  double misclassified_weight = 0.0;
  double correct_weight = 0.0;
};

Ensemble TrainBagging(const TrainingSet& data, const TrainConfig& cfg);
Ensemble TrainRandomForest(const TrainingSet& data, const TrainConfig& cfg,
                           std::vector<TreeAudit>* audits = nullptr);
Ensemble TrainAdaBoost(const TrainingSet& data, const TrainConfig& cfg,
                       std::vector<BoostingRound>* rounds = nullptr);

// alpha = learning_rate * ln((1 - err) / err)
double BoostingAlpha(double error, double learning_rate);

// ---------------------------------------------------------------------------
// Tagged model and persistence.

class Model {
 public:
  using Variant = std::variant<LinearModel, DecisionTree, Ensemble>;

  Model(ModelKind kind, Variant model) : kind_(kind), model_(std::move(model)) {}

  ModelKind kind() const { return kind_; }
  const Variant& get() const { return model_; }
  size_t dim() const;
  Label majority() const;
  Prediction Predict(const SparseVector& x) const;
  // Epochs for linear models, members for ensembles, nodes for a tree.
  std::string Summary() const;

 private:
  ModelKind kind_;
  Variant model_;
};

Model Train(ModelKind kind, const TrainingSet& data, const TrainConfig& cfg);

// Text container:
//   offdetect-model v1
//   kind <name> / dim <n> / vocab <16 hex> / majority <label>
//   <payload>
//   checksum <16 hex FNV-1a of every preceding byte>
void SaveModel(const Model& model, uint64_t vocab_fingerprint,
               std::ostream& out);
void SaveModel(const Model& model, uint64_t vocab_fingerprint,
               const std::string& path);

struct LoadedModel {
  Model model;
  uint64_t vocab_fingerprint;
};

// Throws UnsupportedVersion or CorruptModel.
LoadedModel LoadModel(std::istream& in);
LoadedModel LoadModel(const std::string& path);

}  // namespace offdetect

#endif  // OFFDETECT_CLASSIFIERS_H_
