#include "offdetect/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "offdetect/error.h"
#include "offdetect/rng.h"

namespace offdetect {

namespace {

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view TrimAscii(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<Label> MatchLabel(std::string_view value,
                                const LoadOptions& options) {
  for (const auto& s : options.offensive_labels) {
    if (EqualsIgnoreCase(value, s)) return Label::kOffensive;
  }
  for (const auto& s : options.not_offensive_labels) {
    if (EqualsIgnoreCase(value, s)) return Label::kNotOffensive;
  }
  return std::nullopt;
}

}  // namespace

std::string_view LabelName(Label label) {
  return label == Label::kOffensive ? "OFF" : "NOT_OFF";
}

Dataset::Dataset(std::vector<Tweet> records) : records_(std::move(records)) {
  size_t with_label = 0;
  for (const auto& t : records_) {
    if (IsBlank(t.text)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "tweet '" + t.id + "' has empty text");
    }
    if (t.label) {
      ++with_label;
      ++counts_[*t.label];
    }
  }
  if (with_label != 0 && with_label != records_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "dataset mixes labeled and unlabeled records");
  }
  labeled_ = !records_.empty() && with_label == records_.size();
}

std::vector<std::string> Dataset::Texts() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& t : records_) out.push_back(t.text);
  return out;
}

std::vector<Label> Dataset::Labels() const {
  if (!labeled_ && !records_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "dataset is unlabeled");
  }
  std::vector<Label> out;
  out.reserve(records_.size());
  for (const auto& t : records_) out.push_back(*t.label);
  return out;
}

Dataset ParseTsv(std::istream& in, const LoadOptions& options) {
  std::vector<Tweet> records;
  std::string line;
  size_t line_no = 0;
  bool header_pending = options.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (IsBlank(line)) continue;

    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::kMalformedRow,
                  "line " + std::to_string(line_no) + ": expected text<TAB>label");
    }
    std::string_view text(line.data(), tab);
    std::string_view rest(line.data() + tab + 1, line.size() - tab - 1);
    std::string_view label_field = rest.substr(0, rest.find('\t'));
    if (IsBlank(text)) {
      throw Error(ErrorKind::kMalformedRow,
                  "line " + std::to_string(line_no) + ": empty text");
    }
    const auto label = MatchLabel(TrimAscii(label_field), options);
    if (!label) {
      throw Error(ErrorKind::kUnknownLabel,
                  "line " + std::to_string(line_no) + ": '" +
                      std::string(label_field) + "'");
    }
    records.push_back(
        Tweet{std::to_string(records.size()), std::string(text), *label});
  }
  if (records.empty()) {
    throw Error(ErrorKind::kEmptyDataset, "no records");
  }
  return Dataset(std::move(records));
}

Dataset LoadTsv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  try {
    return ParseTsv(in, options);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

void DumpTsv(const Dataset& dataset, std::ostream& out) {
  for (const auto& t : dataset.records()) {
    if (t.text.find_first_of("\t\n") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument,
                  "tweet '" + t.id + "' contains a tab or newline");
    }
    out << t.text;
    if (t.label) out << '\t' << LabelName(*t.label);
    out << '\n';
  }
}

void DumpTsv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  DumpTsv(dataset, out);
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

std::pair<Dataset, Dataset> StratifiedSplit(const Dataset& dataset,
                                            double train_fraction,
                                            uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "train_fraction must lie in (0, 1)");
  }
  if (!dataset.labeled()) {
    throw Error(ErrorKind::kInvalidArgument,
                "stratified split needs a labeled dataset");
  }
  const auto& records = dataset.records();
  std::vector<char> in_first(records.size(), 0);
  Rng rng(seed);
  for (Label label : kAllLabels) {
    std::vector<size_t> members;
    for (size_t i = 0; i < records.size(); ++i) {
      if (*records[i].label == label) members.push_back(i);
    }
    const auto take = static_cast<size_t>(
        std::llround(static_cast<double>(members.size()) * train_fraction));
    if (take == 0 || take == members.size()) {
      throw Error(ErrorKind::kClassTooSmall,
                  std::string(LabelName(label)) + " has " +
                      std::to_string(members.size()) +
                      " records; one split part would receive none");
    }
    rng.Shuffle(std::span<size_t>(members));
    for (size_t k = 0; k < take; ++k) in_first[members[k]] = 1;
  }
  std::vector<Tweet> first, second;
  for (size_t i = 0; i < records.size(); ++i) {
    (in_first[i] ? first : second).push_back(records[i]);
  }
  return {Dataset(std::move(first)), Dataset(std::move(second))};
}

ClassDistribution ComputeClassDistribution(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorKind::kEmptyDataset, "no records");
  if (!dataset.labeled()) {
    throw Error(ErrorKind::kInvalidArgument, "dataset is unlabeled");
  }
  ClassDistribution d;
  d.counts = dataset.counts();
  const auto total = static_cast<double>(d.counts.total());
  d.offensive_fraction = static_cast<double>(d.counts.offensive) / total;
  d.not_offensive_fraction = 1.0 - d.offensive_fraction;
  return d;
}

}  // namespace offdetect
