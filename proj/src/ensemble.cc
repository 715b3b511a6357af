#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "offdetect/classifiers.h"
#include "offdetect/error.h"
#include "offdetect/rng.h"

namespace offdetect {
namespace {

constexpr double kMinBoostingError = 1e-10;

// Runs fn(m) for m in [0, n) on a small worker pool. Results land in
// per-member slots, so the outcome does not depend on scheduling.
void ParallelFor(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min<size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (size_t m = 0; m < n; ++m) fn(m);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (size_t m = next++; m < n; m = next++) {
        try {
          fn(m);
        } catch (...) {
          errors[m] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

size_t CeilSqrt(size_t d) {
  auto r = static_cast<size_t>(std::sqrt(static_cast<double>(d)));
  while (r * r < d) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= d) --r;
  return r;
}

// Bootstrap multiplicities: N draws with replacement.
std::vector<double> BootstrapWeights(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> counts(n, 0.0);
  for (size_t i = 0; i < n; ++i) counts[rng.Below(n)] += 1.0;
  return counts;
}

Ensemble TrainVotingTrees(const TrainingSet& data, const TrainConfig& cfg,
                          EnsembleKind kind, size_t max_features,
                          std::vector<TreeAudit>* audits) {
  cfg.Validate();
  const size_t n = static_cast<size_t>(cfg.n_estimators);
  Ensemble ensemble;
  ensemble.kind = kind;
  ensemble.combiner = Combiner::kMajorityVote;
  ensemble.majority = data.counts().Majority();
  ensemble.dim = data.dim();
  ensemble.members.resize(n);
  ensemble.member_weights.assign(n, 1.0);
  if (audits != nullptr) audits->assign(n, TreeAudit{});

  ParallelFor(n, [&](size_t m) {
    const uint64_t member_seed = MixSeed(cfg.seed, m);
    TreeOptions options;
    options.max_depth = cfg.max_depth;
    options.max_features = max_features;
    options.seed = MixSeed(member_seed, 1);
    options.tie_label = ensemble.majority;
    std::vector<double> weights;
    if (cfg.bootstrap) weights = BootstrapWeights(data.size(), member_seed);
    ensemble.members[m] =
        TrainTree(data, options, weights,
                  audits != nullptr ? &(*audits)[m] : nullptr);
  });
  return ensemble;
}

}  // namespace

std::array<size_t, 2> Ensemble::Votes(const SparseVector& x) const {
  std::array<size_t, 2> votes = {0, 0};
  for (const auto& member : members) {
    ++votes[static_cast<int>(member.Predict(x).label)];
  }
  return votes;
}

Prediction Ensemble::Predict(const SparseVector& x) const {
  if (members.empty()) {
    throw Error(ErrorKind::kEmptyEnsemble, "ensemble has no members");
  }
  if (x.dim() != dim) {
    throw Error(ErrorKind::kDimMismatch,
                "vector dim " + std::to_string(x.dim()) + " vs ensemble " +
                    std::to_string(dim));
  }
  if (combiner == Combiner::kWeightedSum) {
    double score = 0.0;
    for (size_t m = 0; m < members.size(); ++m) {
      score += member_weights[m] * Sign(members[m].Predict(x).label);
    }
    return {LabelFromScore(score, majority), score};
  }
  const auto votes = Votes(x);
  const size_t off = votes[static_cast<int>(Label::kOffensive)];
  const size_t not_off = votes[static_cast<int>(Label::kNotOffensive)];
  const Label label = off > not_off   ? Label::kOffensive
                      : not_off > off ? Label::kNotOffensive
                                      : majority;
  const double share =
      static_cast<double>(votes[static_cast<int>(label)]) / members.size();
  return {label, share};
}

double BoostingAlpha(double error, double learning_rate) {
  return learning_rate * std::log((1.0 - error) / error);
}

Ensemble TrainBagging(const TrainingSet& data, const TrainConfig& cfg) {
  return TrainVotingTrees(data, cfg, EnsembleKind::kBagging, 0, nullptr);
}

Ensemble TrainRandomForest(const TrainingSet& data, const TrainConfig& cfg,
                           std::vector<TreeAudit>* audits) {
  const size_t k = cfg.max_features.value_or(CeilSqrt(data.dim()));
  return TrainVotingTrees(data, cfg, EnsembleKind::kRandomForest,
                          std::max<size_t>(k, 1), audits);
}

Ensemble TrainAdaBoost(const TrainingSet& data, const TrainConfig& cfg,
                       std::vector<BoostingRound>* rounds) {
  cfg.Validate();
  const size_t n = data.size();
  Ensemble ensemble;
  ensemble.kind = EnsembleKind::kAdaBoost;
  ensemble.combiner = Combiner::kWeightedSum;
  ensemble.majority = data.counts().Majority();
  ensemble.dim = data.dim();
  if (rounds != nullptr) rounds->clear();

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<char> missed(n);
  TreeOptions options;
  options.max_depth = 1;
  options.tie_label = ensemble.majority;

  for (int m = 0; m < cfg.n_estimators; ++m) {
    options.seed = MixSeed(cfg.seed, static_cast<uint64_t>(m));
    DecisionTree stump = TrainTree(data, options, w);

    double total = 0.0, error = 0.0;
    for (size_t i = 0; i < n; ++i) {
      missed[i] = stump.Predict(data.x()[i]).label != data.y()[i];
      total += w[i];
      if (missed[i]) error += w[i];
    }
    error /= total;

    BoostingRound round;
    round.error = error;
    if (error >= 0.5) {
      round.weight_sum = total;
      for (size_t i = 0; i < n; ++i) {
        (missed[i] ? round.misclassified_weight : round.correct_weight) += w[i];
      }
      if (rounds != nullptr) rounds->push_back(round);
      break;
    }
    const bool perfect = error <= kMinBoostingError;
    round.alpha =
        BoostingAlpha(perfect ? kMinBoostingError : error, cfg.learning_rate);
    round.kept = true;
    ensemble.members.push_back(std::move(stump));
    ensemble.member_weights.push_back(round.alpha);

    if (!perfect) {
      const double boost = std::exp(round.alpha);
      double sum = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (missed[i]) w[i] *= boost;
        sum += w[i];
      }
      for (double& v : w) v /= sum;
    }
    for (size_t i = 0; i < n; ++i) {
      round.weight_sum += w[i];
      (missed[i] ? round.misclassified_weight : round.correct_weight) += w[i];
    }
    if (rounds != nullptr) rounds->push_back(round);
    if (perfect) break;
  }
  return ensemble;
}

}  // namespace offdetect
