#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "offdetect/classifiers.h"
#include "offdetect/error.h"
#include "test_util.h"

namespace offdetect {
namespace {

using testing::Data;

constexpr uint64_t kFingerprint = 0x0123456789abcdefULL;

Data Fixture() {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Data d;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> row(6);
    for (auto& v : row) v = gen() % 2 ? u(gen) : 0.0;
    const bool off = row[0] + row[2] > 0.7 ? u(gen) > 0.1 : u(gen) < 0.1;
    d.Add(row, off ? Label::kOffensive : Label::kNotOffensive);
  }
  return d;
}

std::string Serialize(const Model& m) {
  std::ostringstream out;
  SaveModel(m, kFingerprint, out);
  return out.str();
}

ErrorKind LoadKind(const std::string& text) {
  std::istringstream in(text);
  try {
    LoadModel(in);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kIo;  // sentinel for "loaded fine"
}

TEST(ModelIo, RoundTripEveryKind) {
  const Data d = Fixture();
  for (ModelKind kind : kAllModelKinds) {
    TrainConfig cfg = TrainConfig::Defaults(kind);
    if (IsEnsembleKind(kind)) cfg.n_estimators = 7;
    const Model m = Train(kind, d.set(), cfg);
    const std::string text = Serialize(m);
    std::istringstream in(text);
    const LoadedModel loaded = LoadModel(in);
    EXPECT_EQ(loaded.vocab_fingerprint, kFingerprint);
    EXPECT_EQ(loaded.model.kind(), kind);
    EXPECT_EQ(loaded.model.dim(), m.dim());
    EXPECT_EQ(loaded.model.majority(), m.majority());
    EXPECT_EQ(Serialize(loaded.model), text) << ModelKindName(kind);
    for (const auto& x : d.x) {
      const Prediction a = m.Predict(x);
      const Prediction b = loaded.model.Predict(x);
      EXPECT_EQ(a.label, b.label);
      EXPECT_EQ(a.score, b.score);  // bit-identical
    }
  }
}

TEST(ModelIo, PathVariant) {
  const Data d = Fixture();
  const Model m = Train(ModelKind::kSvm, d.set(), {});
  const auto path = (testing::TempDir("model_io") / "m.model").string();
  SaveModel(m, kFingerprint, path);
  EXPECT_EQ(Serialize(LoadModel(path).model), Serialize(m));
  try {
    LoadModel(path + ".missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
    EXPECT_NE(std::string(e.what()).find("m.model.missing"), std::string::npos);
  }
}

TEST(ModelIo, EveryTruncationIsCorrupt) {
  const Data d = Fixture();
  TrainConfig cfg = TrainConfig::Defaults(ModelKind::kAdaBoost);
  cfg.n_estimators = 3;
  const std::string text = Serialize(Train(ModelKind::kAdaBoost, d.set(), cfg));
  for (size_t len = 0; len < text.size(); ++len) {
    ASSERT_EQ(LoadKind(text.substr(0, len)), ErrorKind::kCorruptModel) << "length " << len;
  }
}

TEST(ModelIo, UnsupportedVersion) {
  const Data d = Fixture();
  std::string text = Serialize(Train(ModelKind::kDecisionTree, d.set(), {}));
  text.replace(text.find("v1"), 2, "v999");
  EXPECT_EQ(LoadKind(text), ErrorKind::kUnsupportedVersion);
}

TEST(ModelIo, ChecksumMismatch) {
  const Data d = Fixture();
  const std::string text = Serialize(Train(ModelKind::kLogReg, d.set(), {}));
  std::string tampered = text;
  const size_t bias = tampered.find("bias ");
  ASSERT_NE(bias, std::string::npos);
  tampered.insert(bias + 5, "1");
  EXPECT_EQ(LoadKind(tampered), ErrorKind::kCorruptModel);
  EXPECT_EQ(LoadKind("hello\n"), ErrorKind::kCorruptModel);
}

TEST(ModelKindNames, ParseRoundTrip) {
  for (ModelKind kind : kAllModelKinds) {
    EXPECT_EQ(ParseModelKind(ModelKindName(kind)), kind);
  }
  EXPECT_FALSE(ParseModelKind("xgboost").has_value());
  EXPECT_TRUE(IsEnsembleKind(ModelKind::kAdaBoost));
  EXPECT_FALSE(IsEnsembleKind(ModelKind::kDecisionTree));
}

}  // namespace
}  // namespace offdetect
