#ifndef OFFDETECT_EVAL_H_
#define OFFDETECT_EVAL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "offdetect/classifiers.h"
#include "offdetect/corpus.h"
#include "offdetect/features.h"
#include "offdetect/normalize.h"

namespace offdetect {

// Positive class is Offensive.
struct ConfusionMatrix {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  size_t tn = 0;

  size_t total() const { return tp + fp + fn + tn; }
  // The same counts with NotOffensive treated as positive.
  ConfusionMatrix Swapped() const { return {tn, fn, fp, tp}; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws LengthMismatch, or EmptyDataset for empty input.
ConfusionMatrix Confusion(std::span<const Label> gold,
                          std::span<const Label> pred);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::string model_tag;
  ClassMetrics offensive;
  ClassMetrics not_offensive;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

// Ratios with a zero denominator are 0. Throws EmptyDataset when the matrix
// is empty.
MetricsReport ComputeMetrics(const ConfusionMatrix& cm,
                             std::string model_tag = "");

// Fixed notation, 4 decimals, ties to even on the exact binary value.
std::string FormatFixed4(double v);

// One header row, one row per report.
std::string RenderTable(std::span<const MetricsReport> reports);

// `tag.metric=value` lines: precision_off recall_off f1_off precision_not
// recall_not f1_not macro_f1 accuracy tp fp fn tn. Reals use the shortest
// representation that parses back to the same double.
std::string RenderDump(std::span<const MetricsReport> reports);
// Inverse of RenderDump. Throws InvalidArgument on malformed lines.
std::vector<MetricsReport> ParseDump(std::string_view text);

struct BenchmarkSpec {
  ModelKind kind;
  TrainConfig config;
};

// Default configuration for every kind, in table order.
std::vector<BenchmarkSpec> DefaultBenchmarkSpecs();

struct BenchmarkOptions {
  NormalizerConfig normalizer;
  FeatureMode features = FeatureMode::kCombined;
  std::optional<std::pair<int, int>> ngram_range;
  // Overrides the seed of every spec.
  uint64_t seed = TrainConfig{}.seed;
};

// Normalizes both sets, fits the featurizer on train only, trains each spec
// and scores it on test. Reports follow spec order.
std::vector<MetricsReport> Benchmark(const Dataset& train, const Dataset& test,
                                     std::span<const BenchmarkSpec> specs,
                                     const BenchmarkOptions& options);

}  // namespace offdetect

#endif  // OFFDETECT_EVAL_H_
