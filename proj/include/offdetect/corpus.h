#ifndef OFFDETECT_CORPUS_H_
#define OFFDETECT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace offdetect {

enum class Label { kNotOffensive = 0, kOffensive = 1 };

constexpr Label kAllLabels[] = {Label::kNotOffensive, Label::kOffensive};

// "OFF" / "NOT_OFF", the shared-task spelling.
std::string_view LabelName(Label label);
inline Label Opposite(Label label) {
  return label == Label::kOffensive ? Label::kNotOffensive : Label::kOffensive;
}

struct Tweet {
  std::string id;
  std::string text;
  std::optional<Label> label;

  bool operator==(const Tweet&) const = default;
};

struct ClassCounts {
  size_t not_offensive = 0;
  size_t offensive = 0;

  size_t total() const { return not_offensive + offensive; }
  size_t& operator[](Label l) {
    return l == Label::kOffensive ? offensive : not_offensive;
  }
  size_t operator[](Label l) const {
    return l == Label::kOffensive ? offensive : not_offensive;
  }
  // Larger class; ties resolve to NotOffensive.
  Label Majority() const {
    return offensive > not_offensive ? Label::kOffensive : Label::kNotOffensive;
  }
  bool operator==(const ClassCounts&) const = default;
};

// Immutable collection of tweets. Either every record carries a label or
// none does.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Tweet> records);

  const std::vector<Tweet>& records() const { return records_; }
  const ClassCounts& counts() const { return counts_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool labeled() const { return labeled_; }

  std::vector<std::string> Texts() const;
  // Throws InvalidArgument on an unlabeled dataset.
  std::vector<Label> Labels() const;

  bool operator==(const Dataset& other) const {
    return records_ == other.records_;
  }

 private:
  std::vector<Tweet> records_;
  ClassCounts counts_;
  bool labeled_ = false;
};

struct LoadOptions {
  bool has_header = false;
  // Accepted spellings, compared case-insensitively.
  std::vector<std::string> offensive_labels = {"OFF"};
  std::vector<std::string> not_offensive_labels = {"NOT_OFF"};
};

// Rows are `text<TAB>label[<TAB>...]`; extra columns are ignored and blank
// lines skipped. Record ids are the 0-based record ordinals.
Dataset LoadTsv(const std::string& path, const LoadOptions& options = {});
Dataset ParseTsv(std::istream& in, const LoadOptions& options = {});

// Writes `text<TAB>label` rows (just `text` for unlabeled sets).
void DumpTsv(const Dataset& dataset, std::ostream& out);
void DumpTsv(const Dataset& dataset, const std::string& path);

// Per-class stratified partition. Each class contributes
// round(count * train_fraction) records to the first part; both parts keep
// the input order.
std::pair<Dataset, Dataset> StratifiedSplit(const Dataset& dataset,
                                            double train_fraction,
                                            uint64_t seed);

struct ClassDistribution {
  ClassCounts counts;
  double not_offensive_fraction = 0.0;
  double offensive_fraction = 0.0;

  double fraction(Label l) const {
    return l == Label::kOffensive ? offensive_fraction : not_offensive_fraction;
  }
};

ClassDistribution ComputeClassDistribution(const Dataset& dataset);

}  // namespace offdetect

#endif  // OFFDETECT_CORPUS_H_
