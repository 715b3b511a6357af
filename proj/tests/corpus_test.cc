#include "offdetect/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "offdetect/error.h"
#include "test_util.h"

namespace offdetect {
namespace {

Dataset Parse(const std::string& tsv, const LoadOptions& options = {}) {
  std::istringstream in(tsv);
  return ParseTsv(in, options);
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

Dataset Synthetic(size_t not_off, size_t off) {
  std::vector<Tweet> records;
  for (size_t i = 0; i < not_off + off; ++i) {
    records.push_back({std::to_string(i), "نص " + std::to_string(i),
                       i < not_off ? Label::kNotOffensive : Label::kOffensive});
  }
  return Dataset(std::move(records));
}

TEST(LoadTsv, CountsThreeRows) {
  const Dataset ds = Parse("a\tOFF\nb\tNOT_OFF\nc\toff\n");
  EXPECT_EQ(ds.counts().offensive, 2u);
  EXPECT_EQ(ds.counts().not_offensive, 1u);
  EXPECT_TRUE(ds.labeled());
  EXPECT_EQ(ds.records()[2].text, "c");
}

TEST(LoadTsv, TableOneTrainingCounts) {
  std::string tsv;
  for (int i = 0; i < 5191; ++i) tsv += "t" + std::to_string(i) + "\tNOT_OFF\n";
  for (int i = 0; i < 278; ++i) tsv += "o" + std::to_string(i) + "\tOFF\n";
  const Dataset ds = Parse(tsv);
  EXPECT_EQ(ds.counts().not_offensive, 5191u);
  EXPECT_EQ(ds.counts().offensive, 278u);
}

TEST(LoadTsv, EmptyInputIsEmptyDataset) {
  EXPECT_EQ(KindOf([] { Parse(""); }), ErrorKind::kEmptyDataset);
  EXPECT_EQ(KindOf([] { Parse("\n\n"); }), ErrorKind::kEmptyDataset);
}

TEST(LoadTsv, RowErrors) {
  EXPECT_EQ(KindOf([] { Parse("a\tOFF\nno tab here\n"); }),
            ErrorKind::kMalformedRow);
  EXPECT_EQ(KindOf([] { Parse("a\tMAYBE\n"); }), ErrorKind::kUnknownLabel);
  try {
    Parse("a\tOFF\nb\tHATE\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("HATE"), std::string::npos);
  }
}

TEST(LoadTsv, PlaceholdersKeptAndExtraColumnsIgnored) {
  const Dataset ds = Parse("@USER مرحبا URL <LF>\tNOT_OFF\tHS\n");
  EXPECT_EQ(ds.records()[0].text, "@USER مرحبا URL <LF>");
}

TEST(LoadTsv, HeaderAndAlternativeLabels) {
  LoadOptions options;
  options.has_header = true;
  options.offensive_labels = {"1"};
  options.not_offensive_labels = {"0"};
  const Dataset ds = Parse("text\tlabel\nx\t1\ny\t0\n", options);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.records()[0].label, Label::kOffensive);
}

TEST(LoadTsv, MissingFileIsIoError) {
  EXPECT_EQ(KindOf([] { LoadTsv("/nonexistent/file.tsv"); }), ErrorKind::kIo);
}

TEST(DumpTsv, RoundTrip) {
  const Dataset ds = Parse("واحد\tOFF\nاثنان ثلاثة\tNOT_OFF\n");
  std::ostringstream out;
  DumpTsv(ds, out);
  EXPECT_EQ(Parse(out.str()), ds);
}

TEST(StratifiedSplit, RoundsPerClass) {
  const Dataset ds = Synthetic(90, 10);
  const auto [a, b] = StratifiedSplit(ds, 0.8, 7);
  EXPECT_EQ(a.size(), 80u);
  EXPECT_EQ(a.counts().not_offensive, 72u);
  EXPECT_EQ(a.counts().offensive, 8u);
  EXPECT_EQ(b.counts().not_offensive, 18u);
  EXPECT_EQ(b.counts().offensive, 2u);
}

TEST(StratifiedSplit, HalfOfTwoByTwo) {
  const auto [a, b] = StratifiedSplit(Synthetic(2, 2), 0.5, 1);
  EXPECT_EQ(a.counts(), (ClassCounts{1, 1}));
  EXPECT_EQ(b.counts(), (ClassCounts{1, 1}));
}

TEST(StratifiedSplit, DeterministicDisjointAndComplete) {
  const Dataset ds = Synthetic(37, 11);
  const auto first = StratifiedSplit(ds, 0.8, 99);
  const auto second = StratifiedSplit(ds, 0.8, 99);
  EXPECT_EQ(first.first, second.first);
  EXPECT_EQ(first.second, second.second);

  std::multiset<std::string> ids;
  for (const auto& t : first.first.records()) ids.insert(t.id);
  for (const auto& t : first.second.records()) ids.insert(t.id);
  EXPECT_EQ(ids.size(), ds.size());
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ds.size());
  EXPECT_EQ(first.first.counts().offensive + first.second.counts().offensive,
            ds.counts().offensive);
}

TEST(StratifiedSplit, ProportionWithinRounding) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset ds = Synthetic(50 + seed * 3, 5 + seed);
    const auto [a, b] = StratifiedSplit(ds, 0.8, seed);
    for (const Dataset* part : {&a, &b}) {
      const double whole = static_cast<double>(ds.counts().offensive) / ds.size();
      const double in_part =
          static_cast<double>(part->counts().offensive) / part->size();
      const double bound =
          1.0 / std::min<double>(part->size(), ds.counts().offensive);
      EXPECT_LE(std::abs(in_part - whole), bound);
    }
  }
}

TEST(StratifiedSplit, ClassTooSmall) {
  EXPECT_EQ(KindOf([] { StratifiedSplit(Synthetic(10, 1), 0.8, 1); }),
            ErrorKind::kClassTooSmall);
  EXPECT_EQ(KindOf([] { StratifiedSplit(Synthetic(10, 10), 1.5, 1); }),
            ErrorKind::kInvalidArgument);
}

TEST(ClassDistribution, TableOneTestSet) {
  const ClassDistribution d = ComputeClassDistribution(Synthetic(821, 179));
  EXPECT_EQ(d.counts.not_offensive, 821u);
  EXPECT_EQ(d.counts.offensive, 179u);
  EXPECT_EQ(d.counts.total(), 1000u);
  EXPECT_NEAR(d.offensive_fraction + d.not_offensive_fraction, 1.0, 1e-12);
}

TEST(ClassDistribution, Fractions) {
  const ClassDistribution d = ComputeClassDistribution(Synthetic(1, 3));
  EXPECT_DOUBLE_EQ(d.offensive_fraction, 0.75);
  EXPECT_DOUBLE_EQ(d.not_offensive_fraction, 0.25);
  const ClassDistribution single = ComputeClassDistribution(Synthetic(0, 1));
  EXPECT_EQ(single.counts.offensive, 1u);
  EXPECT_DOUBLE_EQ(single.fraction(Label::kOffensive), 1.0);
}

}  // namespace
}  // namespace offdetect
