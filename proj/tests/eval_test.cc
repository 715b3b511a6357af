#include "offdetect/eval.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "offdetect/error.h"
#include "test_util.h"

namespace offdetect {
namespace {

constexpr Label kOff = Label::kOffensive;
constexpr Label kNot = Label::kNotOffensive;

TEST(Confusion, Examples) {
  const std::vector<Label> gold = {kOff, kOff, kNot, kNot, kOff};
  const std::vector<Label> pred = {kOff, kNot, kOff, kNot, kOff};
  EXPECT_EQ(Confusion(gold, pred), (ConfusionMatrix{2, 1, 1, 1}));
  EXPECT_EQ(Confusion(gold, gold), (ConfusionMatrix{3, 0, 0, 2}));
}

TEST(Confusion, Errors) {
  const std::vector<Label> one = {kOff};
  const std::vector<Label> none;
  try {
    Confusion(one, none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLengthMismatch);
  }
  try {
    Confusion(none, none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyDataset);
  }
}

TEST(Metrics, WorkedExample) {
  const MetricsReport r = ComputeMetrics({8, 2, 4, 86}, "svm");
  EXPECT_DOUBLE_EQ(r.offensive.precision, 0.8);
  EXPECT_NEAR(r.offensive.recall, 0.6667, 5e-5);
  EXPECT_NEAR(r.offensive.f1, 0.7273, 5e-5);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.94);
  EXPECT_EQ(r.model_tag, "svm");
}

TEST(Metrics, ZeroDenominatorsAreZero) {
  // Never predicts Offensive, and no Offensive gold labels.
  const MetricsReport r = ComputeMetrics({0, 0, 0, 5});
  EXPECT_EQ(r.offensive.precision, 0.0);
  EXPECT_EQ(r.offensive.recall, 0.0);
  EXPECT_EQ(r.offensive.f1, 0.0);
  EXPECT_EQ(r.not_offensive.f1, 1.0);
  EXPECT_EQ(r.macro_f1, 0.5);
  EXPECT_THROW(ComputeMetrics({}), Error);
}

// Independent per-class computation from raw counts.
void CheckAgainstOracle(const MetricsReport& r, const ConfusionMatrix& cm) {
  auto ratio = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
  auto f1 = [](double p, double q) { return p + q == 0 ? 0.0 : 2 * p * q / (p + q); };
  const double p_off = ratio(cm.tp, cm.tp + cm.fp), r_off = ratio(cm.tp, cm.tp + cm.fn);
  const double p_not = ratio(cm.tn, cm.tn + cm.fn), r_not = ratio(cm.tn, cm.tn + cm.fp);
  EXPECT_NEAR(r.offensive.precision, p_off, 1e-12);
  EXPECT_NEAR(r.offensive.recall, r_off, 1e-12);
  EXPECT_NEAR(r.offensive.f1, f1(p_off, r_off), 1e-12);
  EXPECT_NEAR(r.not_offensive.precision, p_not, 1e-12);
  EXPECT_NEAR(r.not_offensive.recall, r_not, 1e-12);
  EXPECT_NEAR(r.not_offensive.f1, f1(p_not, r_not), 1e-12);
  EXPECT_NEAR(r.macro_f1, (f1(p_off, r_off) + f1(p_not, r_not)) / 2, 1e-12);
  EXPECT_NEAR(r.accuracy, double(cm.tp + cm.tn) / cm.total(), 1e-12);
}

TEST(MetricsProperty, RandomMatrices) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 1000; ++trial) {
    ConfusionMatrix cm{gen() % 20, gen() % 20, gen() % 20, gen() % 20};
    if (trial % 7 == 0) cm.fp = 0;
    if (trial % 11 == 0) cm.tp = 0;
    if (cm.total() == 0) cm.tn = 1;
    const MetricsReport r = ComputeMetrics(cm);
    CheckAgainstOracle(r, cm);
    for (double v : {r.offensive.precision, r.offensive.recall, r.offensive.f1,
                     r.not_offensive.precision, r.not_offensive.recall,
                     r.not_offensive.f1, r.macro_f1, r.accuracy}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    // F1 lies between precision and recall.
    EXPECT_LE(r.offensive.f1, std::max(r.offensive.precision, r.offensive.recall) + 1e-12);
    EXPECT_GE(r.offensive.f1 + 1e-12, std::min(r.offensive.precision, r.offensive.recall));
    // Swapping the positive class swaps the per-class blocks.
    const MetricsReport s = ComputeMetrics(cm.Swapped());
    EXPECT_EQ(s.offensive.f1, r.not_offensive.f1);
    EXPECT_EQ(s.not_offensive.precision, r.offensive.precision);
    EXPECT_EQ(s.accuracy, r.accuracy);
  }
}

TEST(FormatFixed4, RoundsHalfToEven) {
  EXPECT_EQ(FormatFixed4(0.03125), "0.0312");
  EXPECT_EQ(FormatFixed4(0.09375), "0.0938");
  EXPECT_EQ(FormatFixed4(1.0), "1.0000");
  EXPECT_EQ(FormatFixed4(0.0), "0.0000");
  EXPECT_EQ(FormatFixed4(2.0 / 3.0), "0.6667");
}

TEST(RenderTable, HeaderAndRow) {
  const std::vector<MetricsReport> reports = {ComputeMetrics({8, 2, 4, 86}, "svm")};
  EXPECT_EQ(RenderTable(reports),
            "model  P(OFF)  R(OFF)  F1(OFF)  P(NOT)  R(NOT)  F1(NOT)  macro-F1  accuracy\n"
            "svm    0.8000  0.6667   0.7273  0.9556  0.9773   0.9663    0.8468    0.9400\n");
}

TEST(RenderTable, LongTagsWidenFirstColumn) {
  const std::vector<MetricsReport> reports = {ComputeMetrics({1, 0, 0, 1}, "rforest"),
                                              ComputeMetrics({1, 0, 0, 1}, "svm")};
  const std::string table = RenderTable(reports);
  EXPECT_EQ(table.substr(0, 9), "model    ");
  EXPECT_NE(table.find("\nsvm      1.0000"), std::string::npos);
}

TEST(Dump, RoundTripsExactly) {
  std::mt19937_64 gen(41);
  std::vector<MetricsReport> reports;
  for (const char* tag : {"svm", "logreg", "adaboost"}) {
    reports.push_back(ComputeMetrics({gen() % 50, gen() % 50, gen() % 50, 1 + gen() % 50}, tag));
  }
  const std::string dump = RenderDump(reports);
  EXPECT_NE(dump.find("svm.macro_f1="), std::string::npos);
  const std::vector<MetricsReport> back = ParseDump(dump);
  ASSERT_EQ(back.size(), reports.size());
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].model_tag, reports[i].model_tag);
    EXPECT_EQ(back[i].confusion, reports[i].confusion);
    EXPECT_EQ(back[i].macro_f1, reports[i].macro_f1);
    EXPECT_EQ(back[i].offensive.recall, reports[i].offensive.recall);
    EXPECT_EQ(back[i].not_offensive.precision, reports[i].not_offensive.precision);
  }
  EXPECT_EQ(RenderDump(back), dump);
  EXPECT_THROW(ParseDump("svm.macro_f1\n"), Error);
  EXPECT_THROW(ParseDump("svm.bogus=1\n"), Error);
}

// ---------------------------------------------------------------------------
// Benchmark.

Dataset Tiny() {
  return Dataset({{"1", "انت كلب حقير", kOff},
                  {"2", "يا كلب يا حقير", kOff},
                  {"3", "صباح الخير يا صديقي", kNot},
                  {"4", "شكرا على المساعدة", kNot}});
}

TEST(Benchmark, SeparableToyCorpus) {
  BenchmarkOptions options;
  options.normalizer = testing::FullConfig();
  const auto specs = DefaultBenchmarkSpecs();
  ASSERT_EQ(specs.size(), kAllModelKinds.size());
  const auto reports = Benchmark(Tiny(), Tiny(), specs, options);
  ASSERT_EQ(reports.size(), specs.size());
  for (size_t i = 0; i < reports.size(); ++i) {
    EXPECT_EQ(reports[i].model_tag, ModelKindName(specs[i].kind));
    EXPECT_EQ(reports[i].offensive.f1, 1.0) << reports[i].model_tag;
    EXPECT_EQ(reports[i].macro_f1, 1.0) << reports[i].model_tag;
  }
}

TEST(Benchmark, Deterministic) {
  BenchmarkOptions options;
  options.normalizer = testing::FullConfig();
  const auto specs = DefaultBenchmarkSpecs();
  const auto a = Benchmark(Tiny(), Tiny(), specs, options);
  const auto b = Benchmark(Tiny(), Tiny(), specs, options);
  EXPECT_EQ(RenderDump(a), RenderDump(b));
}

TEST(Benchmark, UnlabeledTestSetRejected) {
  BenchmarkOptions options;
  options.normalizer = testing::FullConfig();
  const Dataset unlabeled({{"1", "نص", std::nullopt}});
  const auto specs = DefaultBenchmarkSpecs();
  EXPECT_THROW(Benchmark(Tiny(), unlabeled, specs, options), Error);
}

}  // namespace
}  // namespace offdetect
