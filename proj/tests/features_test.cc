#include "offdetect/features.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "offdetect/error.h"
#include "offdetect/rng.h"
#include "offdetect/utf8.h"
#include "oracles.h"

namespace offdetect {
namespace {

using Terms = std::multiset<std::string>;

Terms AsSet(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

FeatureConfig Word(int lo, int hi) {
  return {Weighting::kTfIdf, Analyzer::kWord, lo, hi, 1};
}
FeatureConfig Char(int lo, int hi) {
  return {Weighting::kTfIdf, Analyzer::kChar, lo, hi, 1};
}

TEST(Ngrams, WordUnigramsAndBigrams) {
  EXPECT_EQ(AsSet(ExtractNgrams(std::vector<std::string>{"ا", "ب"}, Word(1, 2))),
            (Terms{"ا", "ب", "ا ب"}));
}

TEST(Ngrams, CharRange) {
  EXPECT_EQ(AsSet(ExtractNgrams(std::string_view("ابج"), Char(2, 3))),
            (Terms{"اب", "بج", "ابج"}));
  EXPECT_EQ(AsSet(ExtractNgrams(std::string_view("ابج"), Char(2, 5))),
            (Terms{"اب", "بج", "ابج"}));
  // Spaces are ordinary characters.
  EXPECT_EQ(AsSet(ExtractNgrams(std::string_view("a b"), Char(2, 2))),
            (Terms{"a ", " b"}));
}

TEST(Ngrams, RepetitionsKept) {
  EXPECT_EQ(ExtractTerms("a a", Word(1, 1)).size(), 2u);
}

TEST(Vocabulary, FitCountsDocuments) {
  const Vocabulary v = Vocabulary::Fit({"a b", "b c"}, FeatureConfig::Count());
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(v.doc_freq(0), 1u);
  EXPECT_EQ(v.doc_freq(1), 2u);
  EXPECT_EQ(v.doc_freq(2), 1u);
  EXPECT_EQ(v.n_docs(), 2u);
}

TEST(Vocabulary, MinDf) {
  FeatureConfig cfg = FeatureConfig::Count();
  cfg.min_df = 2;
  EXPECT_EQ(Vocabulary::Fit({"a b", "b c"}, cfg).terms(),
            std::vector<std::string>{"b"});
}

TEST(Vocabulary, EmptyDocumentAndCorpus) {
  EXPECT_EQ(Vocabulary::Fit({""}, Word(1, 2)).size(), 0u);
  try {
    Vocabulary::Fit({}, Word(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyCorpus);
  }
}

TEST(Vocabulary, CountRestrictedToWordUnigrams) {
  FeatureConfig cfg = FeatureConfig::Count();
  cfg.ngram_max = 2;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = FeatureConfig::Count();
  cfg.analyzer = Analyzer::kChar;
  EXPECT_THROW(cfg.Validate(), Error);
  EXPECT_THROW(Word(3, 2).Validate(), Error);
}

TEST(Vocabulary, IndexOrderIndependentOfCorpusOrder) {
  const Vocabulary a = Vocabulary::Fit({"z y", "x w", "y x"}, Word(1, 2));
  const Vocabulary b = Vocabulary::Fit({"y x", "z y", "x w"}, Word(1, 2));
  EXPECT_EQ(a, b);
}

TEST(TransformCount, Counts) {
  const Vocabulary v = Vocabulary::Fit({"a", "b", "c"}, FeatureConfig::Count());
  EXPECT_EQ(v.TransformCount("b b c").DebugString(), "1:2 2:1");
  EXPECT_TRUE(v.TransformCount("q r").is_zero());
  EXPECT_TRUE(v.TransformCount("").is_zero());
  EXPECT_EQ(v.TransformCount("").dim(), 3u);
}

TEST(TransformTfIdf, HandComputedExample) {
  const Vocabulary v =
      Vocabulary::Fit({"a b", "a c", "a d"}, {Weighting::kTfIdf, Analyzer::kWord, 1, 1, 1});
  EXPECT_DOUBLE_EQ(v.Idf(*v.Index("a")), 1.0);
  EXPECT_NEAR(v.Idf(*v.Index("b")), std::log(2.0) + 1.0, 1e-15);
  const SparseVector x = v.TransformTfIdf("a b");
  EXPECT_NEAR(x.At(*v.Index("a")), 0.5085, 5e-5);
  EXPECT_NEAR(x.At(*v.Index("b")), 0.8610, 5e-5);
}

TEST(TransformTfIdf, ZeroStaysZeroAndSingleDocIdfIsOne) {
  const Vocabulary v = Vocabulary::Fit({"x y z"}, Word(1, 1));
  EXPECT_TRUE(v.TransformTfIdf("q").is_zero());
  for (size_t i = 0; i < v.size(); ++i) EXPECT_DOUBLE_EQ(v.Idf(i), 1.0);
}

TEST(Combine, Concatenates) {
  const SparseVector w({{1, 2.0}}, 3);
  const SparseVector c({{0, 1.0}}, 4);
  const SparseVector joined = Combine(w, c);
  EXPECT_EQ(joined.dim(), 7u);
  EXPECT_EQ(joined.DebugString(), "1:2 3:1");
  EXPECT_TRUE(Combine(SparseVector({}, 3), SparseVector({}, 4)).is_zero());
  const SparseVector id = Combine(w, SparseVector({}, 0));
  EXPECT_EQ(id.DebugString(), w.DebugString());
  EXPECT_EQ(id.dim(), w.dim());
}

TEST(SparseVector, RejectsBadEntries) {
  EXPECT_THROW(SparseVector({{2, 1.0}, {1, 1.0}}, 3), Error);
  EXPECT_THROW(SparseVector({{3, 1.0}}, 3), Error);
  EXPECT_THROW(SparseVector({{0, 0.0}}, 3), Error);
}

// ---------------------------------------------------------------------------
TEST(TfIdfOracle, FiftyRandomCorpora) {
  const std::vector<std::string> words = {"ا", "ب", "ولد", "كتاب", "a", "bb", "c"};
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n_docs = 1 + rng.Below(5);
    std::vector<std::string> corpus;
    for (size_t d = 0; d < n_docs; ++d) {
      std::string doc;
      const size_t len = rng.Below(5);
      for (size_t k = 0; k < len; ++k) {
        if (!doc.empty()) doc += ' ';
        doc += words[rng.Below(words.size())];
      }
      corpus.push_back(doc);
    }
    const bool chars = trial % 2 == 1;
    const int lo = chars ? 2 : 1;
    const int hi = chars ? 3 : 2;
    const Vocabulary vocab = Vocabulary::Fit(corpus, chars ? Char(lo, hi) : Word(lo, hi));
    ASSERT_LE(vocab.size(), chars ? 60u : 20u);

    std::vector<std::string> queries = corpus;
    queries.push_back(words[rng.Below(words.size())] + " " + words[rng.Below(words.size())]);
    for (const auto& q : queries) {
      const SparseVector got = vocab.TransformTfIdf(q);
      const auto want = testing::OracleTfIdf(corpus, q, chars, lo, hi);
      ASSERT_EQ(got.nnz(), want.size()) << "query '" << q << "'";
      for (const auto& [term, value] : want) {
        const auto idx = vocab.Index(term);
        ASSERT_TRUE(idx.has_value()) << term;
        EXPECT_NEAR(got.At(*idx), value, 1e-9) << term;
      }
      if (!got.is_zero()) EXPECT_NEAR(got.Norm(), 1.0, 1e-9);
    }
  }
}

TEST(TfIdfProperty, UnitNormAndCountSums) {
  Rng rng(7);
  const std::vector<std::string> words = {"ولد", "بنت", "كبير", "صغير", "x", "y"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> corpus;
    for (int d = 0; d < 8; ++d) {
      std::string doc;
      for (size_t k = 0, len = 1 + rng.Below(6); k < len; ++k) {
        doc += (k ? " " : "") + words[rng.Below(words.size())];
      }
      corpus.push_back(doc);
    }
    const Vocabulary tfidf = Vocabulary::Fit(corpus, Char(2, 5));
    const Vocabulary count = Vocabulary::Fit(corpus, FeatureConfig::Count());
    for (const auto& doc : corpus) {
      const SparseVector v = tfidf.TransformTfIdf(doc);
      // A one-character document has no character bigrams.
      if (utf8::Decode(doc).size() >= 2) EXPECT_NEAR(v.Norm(), 1.0, 1e-9);
      double total = 0.0;
      const SparseVector counts = count.TransformCount(doc);
      for (const auto& e : counts.entries()) total += e.value;
      EXPECT_EQ(total, static_cast<double>(text::Tokenize(doc).size()));
    }
  }
}

// ---------------------------------------------------------------------------
// Featurizer.

const std::vector<std::string> kCorpus = {"ولد كبير", "بنت صغيره جدا",
                                          "ولد صغير"};

TEST(Featurizer, CombinedDimIsSum) {
  const Featurizer f = Featurizer::Fit(kCorpus, FeatureMode::kCombined);
  ASSERT_EQ(f.vocabularies().size(), 2u);
  EXPECT_EQ(f.dim(), f.vocabularies()[0].size() + f.vocabularies()[1].size());
  const SparseVector x = f.Transform("ولد كبير");
  EXPECT_EQ(x.dim(), f.dim());
  // Two unit-norm halves.
  EXPECT_NEAR(x.Norm(), std::sqrt(2.0), 1e-9);
}

TEST(Featurizer, NgramOverrideReachesEveryVocabulary) {
  const Featurizer f = Featurizer::Fit(kCorpus, FeatureMode::kCombined,
                                       std::make_pair(1, 4));
  for (const auto& v : f.vocabularies()) {
    EXPECT_EQ(v.config().ngram_min, 1);
    EXPECT_EQ(v.config().ngram_max, 4);
  }
}

TEST(Featurizer, SaveLoadRoundTrip) {
  for (FeatureMode mode : {FeatureMode::kCount, FeatureMode::kTfIdfWord,
                           FeatureMode::kTfIdfChar, FeatureMode::kCombined}) {
    const Featurizer f = Featurizer::Fit(kCorpus, mode);
    std::stringstream buf;
    f.Save(buf);
    const Featurizer g = Featurizer::Load(buf);
    EXPECT_EQ(g.Fingerprint(), f.Fingerprint());
    EXPECT_EQ(g.mode(), mode);
    for (const auto& doc : kCorpus) {
      EXPECT_EQ(g.Transform(doc).DebugString(), f.Transform(doc).DebugString());
    }
  }
}

TEST(Featurizer, LoadErrors) {
  std::stringstream bad_version("offdetect-features v9 mode=combined vocabularies=0\n");
  try {
    Featurizer::Load(bad_version);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupportedVersion);
  }
  const Featurizer f = Featurizer::Fit(kCorpus, FeatureMode::kTfIdfWord);
  std::stringstream buf;
  f.Save(buf);
  std::string text = buf.str();
  std::stringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(Featurizer::Load(truncated), Error);
}

TEST(Featurizer, FingerprintTracksVocabulary) {
  const Featurizer a = Featurizer::Fit(kCorpus, FeatureMode::kTfIdfWord);
  const Featurizer b = Featurizer::Fit({"شيء اخر"}, FeatureMode::kTfIdfWord);
  EXPECT_NE(a.Fingerprint(), b.Fingerprint());
}

}  // namespace
}  // namespace offdetect
