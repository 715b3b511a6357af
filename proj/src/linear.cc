#include <cmath>
#include <vector>

#include "offdetect/classifiers.h"
#include "offdetect/error.h"

namespace offdetect {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> Scores(const TrainingSet& data, std::span<const double> w,
                           double b) {
  std::vector<double> s(data.size());
  for (size_t i = 0; i < data.size(); ++i) s[i] = data.x()[i].Dot(w) + b;
  return s;
}

double SampleWeight(Label y, double positive_class_weight) {
  return y == Label::kOffensive ? positive_class_weight : 1.0;
}

double SquaredNorm(std::span<const double> w) {
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return sq;
}

// Per-sample loss and d(loss)/d(score) for one margin formulation.
struct LossPoint {
  double loss;
  double dscore;
};

template <typename LossFn>
ObjectiveValue Objective(const TrainingSet& data, std::span<const double> w,
                         double b, double l2_lambda, bool with_gradient,
                         double positive_class_weight, LossFn loss_fn) {
  if (w.size() != data.dim()) {
    throw Error(ErrorKind::kDimMismatch, "weight vector does not match data");
  }
  const std::vector<double> s = Scores(data, w, b);
  double total_weight = 0.0;
  for (Label y : data.y()) total_weight += SampleWeight(y, positive_class_weight);

  ObjectiveValue out;
  if (with_gradient) out.grad_w.assign(w.size(), 0.0);
  double loss = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    const Label y = data.y()[i];
    const double c = SampleWeight(y, positive_class_weight) / total_weight;
    const LossPoint p = loss_fn(Sign(y), s[i]);
    loss += c * p.loss;
    if (with_gradient && p.dscore != 0.0) {
      const double g = c * p.dscore;
      for (const auto& e : data.x()[i].entries()) out.grad_w[e.index] += g * e.value;
      out.grad_b += g;
    }
  }
  out.value = loss + 0.5 * l2_lambda * SquaredNorm(w);
  if (with_gradient) {
    for (size_t j = 0; j < w.size(); ++j) out.grad_w[j] += l2_lambda * w[j];
  }
  return out;
}

LossPoint LogisticPoint(double t, double s) {
  return {Softplus(-t * s), -t * Sigmoid(-t * s)};
}

LossPoint HingePoint(double t, double s) {
  const double margin = t * s;
  if (margin >= 1.0) return {0.0, 0.0};
  return {1.0 - margin, -t};
}

using ObjectiveFn = ObjectiveValue (*)(const TrainingSet&,
                                       std::span<const double>, double, double,
                                       bool, double);

// Shared descent loop. `step_for_epoch` gives the nominal step; a step that
// would raise the objective is halved until it does not, and training stops
// if no such step exists.
template <typename StepFn>
LinearModel Descend(const TrainingSet& data, const TrainConfig& cfg,
                    LinearKind kind, ObjectiveFn objective,
                    StepFn step_for_epoch, bool keep_halved_step,
                    ObjectiveTrace* trace) {
  cfg.Validate();
  data.RequireBothClasses();
  constexpr int kMaxHalvings = 60;

  LinearModel model;
  model.kind = kind;
  model.majority = data.counts().Majority();
  model.weights.assign(data.dim(), 0.0);

  const double pcw = cfg.positive_class_weight;
  ObjectiveValue current =
      objective(data, model.weights, model.bias, cfg.l2_lambda, true, pcw);
  if (trace != nullptr) trace->assign(1, current.value);

  std::vector<double> trial_w(data.dim());
  double scale = 1.0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    double step = step_for_epoch(epoch) * scale;
    bool accepted = false;
    double trial_b = 0.0;
    ObjectiveValue next;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (size_t j = 0; j < trial_w.size(); ++j) {
        trial_w[j] = model.weights[j] - step * current.grad_w[j];
      }
      trial_b = model.bias - step * current.grad_b;
      next = objective(data, trial_w, trial_b, cfg.l2_lambda, false, pcw);
      if (next.value <= current.value) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (keep_halved_step) scale *= 0.5;
    }
    if (!accepted) break;

    const double decrease = current.value - next.value;
    model.weights.swap(trial_w);
    model.bias = trial_b;
    model.epochs = epoch + 1;
    current = objective(data, model.weights, model.bias, cfg.l2_lambda, true, pcw);
    if (trace != nullptr) trace->push_back(current.value);
    if (decrease < cfg.tolerance) break;
  }
  return model;
}

}  // namespace

Prediction LinearModel::Predict(const SparseVector& x) const {
  const double score = x.Dot(weights) + bias;
  return {LabelFromScore(score, majority), score};
}

ObjectiveValue LogisticObjective(const TrainingSet& data,
                                 std::span<const double> w, double b,
                                 double l2_lambda, bool with_gradient,
                                 double positive_class_weight) {
  return Objective(data, w, b, l2_lambda, with_gradient, positive_class_weight,
                   LogisticPoint);
}

ObjectiveValue HingeObjective(const TrainingSet& data, std::span<const double> w,
                              double b, double l2_lambda, bool with_gradient,
                              double positive_class_weight) {
  return Objective(data, w, b, l2_lambda, with_gradient, positive_class_weight,
                   HingePoint);
}

LinearModel TrainLogReg(const TrainingSet& data, const TrainConfig& cfg,
                        ObjectiveTrace* trace) {
  const double lr = cfg.learning_rate;
  return Descend(
      data, cfg, LinearKind::kLogistic, &LogisticObjective,
      [lr](int) { return lr; }, /*keep_halved_step=*/true, trace);
}

LinearModel TrainSvm(const TrainingSet& data, const TrainConfig& cfg,
                     ObjectiveTrace* trace) {
  const double lr = cfg.learning_rate;
  return Descend(
      data, cfg, LinearKind::kHingeSvm, &HingeObjective,
      [lr](int epoch) { return lr / (1.0 + epoch); },
      /*keep_halved_step=*/false, trace);
}

}  // namespace offdetect
