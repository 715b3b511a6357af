#ifndef OFFDETECT_FEATURES_H_
#define OFFDETECT_FEATURES_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "offdetect/sparse.h"
#include "offdetect/text.h"

namespace offdetect {

enum class Weighting { kCount, kTfIdf };
enum class Analyzer { kWord, kChar };

struct FeatureConfig {
  Weighting weighting = Weighting::kTfIdf;
  Analyzer analyzer = Analyzer::kWord;
  int ngram_min = 1;
  int ngram_max = 2;
  int min_df = 1;

  // Unigram word counts.
  static FeatureConfig Count() { return {Weighting::kCount, Analyzer::kWord, 1, 1, 1}; }
  // TF-IDF over word 1-2 grams.
  static FeatureConfig TfIdfWord() { return {Weighting::kTfIdf, Analyzer::kWord, 1, 2, 1}; }
  // TF-IDF over character 2-5 grams.
  static FeatureConfig TfIdfChar() { return {Weighting::kTfIdf, Analyzer::kChar, 2, 5, 1}; }

  // Throws InvalidArgument. Count weighting is restricted to word unigrams.
  void Validate() const;
  std::string ToString() const;
  bool operator==(const FeatureConfig&) const = default;
};

using text::Tokenize;

// All contiguous n-grams for n in [ngram_min, ngram_max], with
// repetitions. Word n-grams are joined by one space; char n-grams run over
// codepoints of the whole string, spaces included.
std::vector<std::string> ExtractNgrams(const std::vector<std::string>& tokens,
                                       const FeatureConfig& config);
std::vector<std::string> ExtractNgrams(std::string_view text,
                                       const FeatureConfig& config);
// Dispatches on config.analyzer.
std::vector<std::string> ExtractTerms(std::string_view text,
                                      const FeatureConfig& config);

// Term index, document frequencies and corpus size of a fitted feature
// space. Indices follow lexicographic (byte) order of the terms.
class Vocabulary {
 public:
  // Throws EmptyCorpus when `corpus` has no documents.
  static Vocabulary Fit(const std::vector<std::string>& corpus,
                        const FeatureConfig& config);

  size_t size() const { return terms_.size(); }
  size_t n_docs() const { return n_docs_; }
  const FeatureConfig& config() const { return config_; }
  const std::vector<std::string>& terms() const { return terms_; }
  uint32_t doc_freq(size_t index) const { return doc_freq_[index]; }
  std::optional<uint32_t> Index(std::string_view term) const;

  // ln((1 + n_docs) / (1 + df)) + 1
  double Idf(size_t index) const;

  // Raw in-vocabulary term counts.
  SparseVector TransformCount(std::string_view text) const;
  // Raw count times idf, scaled to unit Euclidean norm unless zero.
  SparseVector TransformTfIdf(std::string_view text) const;
  // Chooses by config().weighting.
  SparseVector Transform(std::string_view text) const;

  // Header line `#vocab n_docs=.. weighting=.. ...` followed by
  // `term<TAB>index<TAB>doc_freq` rows.
  void Save(std::ostream& out) const;
  static Vocabulary Load(std::istream& in);

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && doc_freq_ == other.doc_freq_ &&
           n_docs_ == other.n_docs_ && config_ == other.config_;
  }

 private:
  Vocabulary(std::vector<std::string> terms, std::vector<uint32_t> doc_freq,
             size_t n_docs, FeatureConfig config);
  std::vector<uint32_t> TermIndices(std::string_view text) const;

  std::vector<std::string> terms_;
  std::vector<uint32_t> doc_freq_;
  size_t n_docs_ = 0;
  FeatureConfig config_;
  std::unordered_map<std::string, uint32_t> index_;
};

enum class FeatureMode { kCount, kTfIdfWord, kTfIdfChar, kCombined };

std::string_view FeatureModeName(FeatureMode mode);
std::optional<FeatureMode> ParseFeatureMode(std::string_view name);

// One vocabulary per analyzer in use; `combined` concatenates word TF-IDF
// and char TF-IDF vectors. Persisted as a versioned file of vocabulary
// blocks whose FNV-1a hash is the fingerprint stored in model files.
class Featurizer {
 public:
  // Optional range overrides apply to every vocabulary of the mode.
  static Featurizer Fit(const std::vector<std::string>& corpus,
                        FeatureMode mode,
                        std::optional<std::pair<int, int>> ngram_range = {},
                        int min_df = 1);

  SparseVector Transform(std::string_view text) const;
  std::vector<SparseVector> TransformAll(
      const std::vector<std::string>& texts) const;

  size_t dim() const;
  FeatureMode mode() const { return mode_; }
  const std::vector<Vocabulary>& vocabularies() const { return vocabs_; }
  uint64_t Fingerprint() const;

  void Save(std::ostream& out) const;
  void Save(const std::string& path) const;
  static Featurizer Load(std::istream& in);
  static Featurizer Load(const std::string& path);

 private:
  FeatureMode mode_ = FeatureMode::kCombined;
  std::vector<Vocabulary> vocabs_;
};

}  // namespace offdetect

#endif  // OFFDETECT_FEATURES_H_
