#include "offdetect/features.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "offdetect/checksum.h"
#include "offdetect/error.h"
#include "offdetect/utf8.h"

namespace offdetect {

namespace {

[[noreturn]] void Corrupt(const std::string& what) {
  throw Error(ErrorKind::kCorruptModel, "vocabulary: " + what);
}

// Parses `key=value` fields of a header line.
std::map<std::string, std::string> ParseFields(std::string_view line) {
  std::map<std::string, std::string> fields;
  std::istringstream ss{std::string(line)};
  std::string field;
  while (ss >> field) {
    const size_t eq = field.find('=');
    if (eq != std::string::npos) {
      fields[field.substr(0, eq)] = field.substr(eq + 1);
    }
  }
  return fields;
}

long long ParseInt(const std::map<std::string, std::string>& fields,
                   const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) Corrupt("missing header field '" + key + "'");
  try {
    size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    Corrupt("bad value for '" + key + "'");
  }
}

}  // namespace

void FeatureConfig::Validate() const {
  if (ngram_min < 1 || ngram_max < ngram_min) {
    throw Error(ErrorKind::kInvalidArgument,
                "n-gram range must satisfy 1 <= min <= max");
  }
  if (min_df < 1) {
    throw Error(ErrorKind::kInvalidArgument, "min_df must be >= 1");
  }
  if (weighting == Weighting::kCount &&
      (analyzer != Analyzer::kWord || ngram_min != 1 || ngram_max != 1)) {
    throw Error(ErrorKind::kInvalidArgument,
                "count features are word unigrams only");
  }
}

std::string FeatureConfig::ToString() const {
  std::ostringstream ss;
  ss << "weighting=" << (weighting == Weighting::kCount ? "count" : "tfidf")
     << " analyzer=" << (analyzer == Analyzer::kWord ? "word" : "char")
     << " ngram_min=" << ngram_min << " ngram_max=" << ngram_max
     << " min_df=" << min_df;
  return ss.str();
}

std::vector<std::string> ExtractNgrams(const std::vector<std::string>& tokens,
                                       const FeatureConfig& config) {
  std::vector<std::string> grams;
  for (int n = config.ngram_min; n <= config.ngram_max; ++n) {
    const auto len = static_cast<size_t>(n);
    for (size_t i = 0; i + len <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (size_t k = 1; k < len; ++k) {
        gram.push_back(' ');
        gram += tokens[i + k];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

std::vector<std::string> ExtractNgrams(std::string_view text,
                                       const FeatureConfig& config) {
  const std::u32string cps = utf8::Decode(text);
  std::vector<std::string> grams;
  for (int n = config.ngram_min; n <= config.ngram_max; ++n) {
    const auto len = static_cast<size_t>(n);
    for (size_t i = 0; i + len <= cps.size(); ++i) {
      grams.push_back(utf8::Encode(std::u32string_view(cps).substr(i, len)));
    }
  }
  return grams;
}

std::vector<std::string> ExtractTerms(std::string_view text,
                                      const FeatureConfig& config) {
  if (config.analyzer == Analyzer::kWord) {
    return ExtractNgrams(Tokenize(text), config);
  }
  return ExtractNgrams(text, config);
}

Vocabulary::Vocabulary(std::vector<std::string> terms,
                       std::vector<uint32_t> doc_freq, size_t n_docs,
                       FeatureConfig config)
    : terms_(std::move(terms)),
      doc_freq_(std::move(doc_freq)),
      n_docs_(n_docs),
      config_(config) {
  index_.reserve(terms_.size());
  for (size_t i = 0; i < terms_.size(); ++i) {
    index_.emplace(terms_[i], static_cast<uint32_t>(i));
  }
}

Vocabulary Vocabulary::Fit(const std::vector<std::string>& corpus,
                           const FeatureConfig& config) {
  config.Validate();
  if (corpus.empty()) throw Error(ErrorKind::kEmptyCorpus, "no documents");
  std::unordered_map<std::string, uint32_t> df;
  for (const auto& doc : corpus) {
    auto terms = ExtractTerms(doc, config);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms) ++df[std::move(t)];
  }
  std::vector<std::pair<std::string, uint32_t>> kept;
  for (auto& [term, count] : df) {
    if (count >= static_cast<uint32_t>(config.min_df)) {
      kept.emplace_back(term, count);
    }
  }
  std::sort(kept.begin(), kept.end());
  std::vector<std::string> terms;
  std::vector<uint32_t> freqs;
  terms.reserve(kept.size());
  freqs.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    freqs.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(freqs), corpus.size(), config);
}

std::optional<uint32_t> Vocabulary::Index(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::Idf(size_t index) const {
  return std::log((1.0 + static_cast<double>(n_docs_)) /
                  (1.0 + static_cast<double>(doc_freq_[index]))) +
         1.0;
}

std::vector<uint32_t> Vocabulary::TermIndices(std::string_view text) const {
  std::vector<uint32_t> ids;
  for (const auto& term : ExtractTerms(text, config_)) {
    const auto it = index_.find(term);
    if (it != index_.end()) ids.push_back(it->second);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

SparseVector Vocabulary::TransformCount(std::string_view text) const {
  const auto ids = TermIndices(text);
  std::vector<SparseEntry> entries;
  for (size_t i = 0; i < ids.size();) {
    size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    entries.push_back({ids[i], static_cast<double>(j - i)});
    i = j;
  }
  return SparseVector(std::move(entries), size());
}

SparseVector Vocabulary::TransformTfIdf(std::string_view text) const {
  SparseVector counts = TransformCount(text);
  std::vector<SparseEntry> entries = counts.entries();
  double sq = 0.0;
  for (auto& e : entries) {
    e.value *= Idf(e.index);
    sq += e.value * e.value;
  }
  if (sq > 0.0) {
    const double norm = std::sqrt(sq);
    for (auto& e : entries) e.value /= norm;
  }
  return SparseVector(std::move(entries), size());
}

SparseVector Vocabulary::Transform(std::string_view text) const {
  return config_.weighting == Weighting::kCount ? TransformCount(text)
                                                : TransformTfIdf(text);
}

void Vocabulary::Save(std::ostream& out) const {
  out << "#vocab n_docs=" << n_docs_ << ' ' << config_.ToString()
      << " terms=" << terms_.size() << '\n';
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].find_first_of("\t\n\r") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument,
                  "term with tab or newline cannot be saved");
    }
    out << terms_[i] << '\t' << i << '\t' << doc_freq_[i] << '\n';
  }
}

Vocabulary Vocabulary::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#vocab ", 0) != 0) {
    Corrupt("missing #vocab header");
  }
  const auto fields = ParseFields(line);
  FeatureConfig config;
  const auto w = fields.find("weighting");
  const auto a = fields.find("analyzer");
  if (w == fields.end() || a == fields.end()) Corrupt("missing config");
  if (w->second == "count") {
    config.weighting = Weighting::kCount;
  } else if (w->second == "tfidf") {
    config.weighting = Weighting::kTfIdf;
  } else {
    Corrupt("unknown weighting '" + w->second + "'");
  }
  if (a->second == "word") {
    config.analyzer = Analyzer::kWord;
  } else if (a->second == "char") {
    config.analyzer = Analyzer::kChar;
  } else {
    Corrupt("unknown analyzer '" + a->second + "'");
  }
  config.ngram_min = static_cast<int>(ParseInt(fields, "ngram_min"));
  config.ngram_max = static_cast<int>(ParseInt(fields, "ngram_max"));
  config.min_df = static_cast<int>(ParseInt(fields, "min_df"));
  try {
    config.Validate();
  } catch (const Error& e) {
    Corrupt(e.detail());
  }
  const long long n_docs = ParseInt(fields, "n_docs");
  const long long n_terms = ParseInt(fields, "terms");
  if (n_docs < 1 || n_terms < 0) Corrupt("bad sizes");

  std::vector<std::string> terms;
  std::vector<uint32_t> freqs;
  terms.reserve(static_cast<size_t>(n_terms));
  for (long long i = 0; i < n_terms; ++i) {
    if (!std::getline(in, line)) Corrupt("truncated term list");
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) Corrupt("bad row " + std::to_string(i));
    std::string term = line.substr(0, t1);
    long long index = -1, df = -1;
    try {
      index = std::stoll(line.substr(t1 + 1, t2 - t1 - 1));
      df = std::stoll(line.substr(t2 + 1));
    } catch (const std::exception&) {
      Corrupt("bad row " + std::to_string(i));
    }
    if (index != i) Corrupt("index gap at row " + std::to_string(i));
    if (df < 1 || df > n_docs) Corrupt("doc_freq out of range");
    if (!terms.empty() && !(terms.back() < term)) Corrupt("terms not sorted");
    terms.push_back(std::move(term));
    freqs.push_back(static_cast<uint32_t>(df));
  }
  return Vocabulary(std::move(terms), std::move(freqs),
                    static_cast<size_t>(n_docs), config);
}

std::string_view FeatureModeName(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kCount: return "count";
    case FeatureMode::kTfIdfWord: return "tfidf-word";
    case FeatureMode::kTfIdfChar: return "tfidf-char";
    case FeatureMode::kCombined: return "combined";
  }
  return "?";
}

std::optional<FeatureMode> ParseFeatureMode(std::string_view name) {
  for (auto m : {FeatureMode::kCount, FeatureMode::kTfIdfWord,
                 FeatureMode::kTfIdfChar, FeatureMode::kCombined}) {
    if (FeatureModeName(m) == name) return m;
  }
  return std::nullopt;
}

Featurizer Featurizer::Fit(const std::vector<std::string>& corpus,
                           FeatureMode mode,
                           std::optional<std::pair<int, int>> ngram_range,
                           int min_df) {
  std::vector<FeatureConfig> configs;
  switch (mode) {
    case FeatureMode::kCount: configs = {FeatureConfig::Count()}; break;
    case FeatureMode::kTfIdfWord: configs = {FeatureConfig::TfIdfWord()}; break;
    case FeatureMode::kTfIdfChar: configs = {FeatureConfig::TfIdfChar()}; break;
    case FeatureMode::kCombined:
      configs = {FeatureConfig::TfIdfWord(), FeatureConfig::TfIdfChar()};
      break;
  }
  Featurizer f;
  f.mode_ = mode;
  for (auto& c : configs) {
    if (ngram_range) {
      c.ngram_min = ngram_range->first;
      c.ngram_max = ngram_range->second;
    }
    c.min_df = min_df;
    f.vocabs_.push_back(Vocabulary::Fit(corpus, c));
  }
  return f;
}

SparseVector Featurizer::Transform(std::string_view text) const {
  SparseVector v = vocabs_.front().Transform(text);
  for (size_t i = 1; i < vocabs_.size(); ++i) {
    v = Combine(v, vocabs_[i].Transform(text));
  }
  return v;
}

std::vector<SparseVector> Featurizer::TransformAll(
    const std::vector<std::string>& texts) const {
  std::vector<SparseVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(Transform(t));
  return out;
}

size_t Featurizer::dim() const {
  size_t d = 0;
  for (const auto& v : vocabs_) d += v.size();
  return d;
}

uint64_t Featurizer::Fingerprint() const {
  std::ostringstream ss;
  Save(ss);
  return Fnv1a64(ss.str());
}

void Featurizer::Save(std::ostream& out) const {
  out << "offdetect-features v1 mode=" << FeatureModeName(mode_)
      << " vocabularies=" << vocabs_.size() << '\n';
  for (const auto& v : vocabs_) v.Save(out);
}

void Featurizer::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  Save(out);
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

Featurizer Featurizer::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("offdetect-features ", 0) != 0) {
    Corrupt("missing offdetect-features header");
  }
  if (line.rfind("offdetect-features v1 ", 0) != 0) {
    throw Error(ErrorKind::kUnsupportedVersion, "vocabulary file: " + line);
  }
  const auto fields = ParseFields(line);
  const auto mode_it = fields.find("mode");
  const auto mode = mode_it == fields.end()
                        ? std::nullopt
                        : ParseFeatureMode(mode_it->second);
  if (!mode) Corrupt("unknown feature mode");
  const long long n = ParseInt(fields, "vocabularies");
  const long long expected = *mode == FeatureMode::kCombined ? 2 : 1;
  if (n != expected) Corrupt("wrong number of vocabularies");
  Featurizer f;
  f.mode_ = *mode;
  for (long long i = 0; i < n; ++i) f.vocabs_.push_back(Vocabulary::Load(in));
  return f;
}

Featurizer Featurizer::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return Load(in);
}

}  // namespace offdetect
