#include "offdetect/eval.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "offdetect/error.h"

namespace offdetect {
namespace {

double Ratio(size_t num, size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double F1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

ClassMetrics PositiveMetrics(const ConfusionMatrix& cm) {
  ClassMetrics m;
  m.precision = Ratio(cm.tp, cm.tp + cm.fp);
  m.recall = Ratio(cm.tp, cm.tp + cm.fn);
  m.f1 = F1(m.precision, m.recall);
  return m;
}

std::string Shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Column {
  std::string_view header;
  std::string_view key;
};

constexpr Column kColumns[] = {
    {"P(OFF)", "precision_off"}, {"R(OFF)", "recall_off"},
    {"F1(OFF)", "f1_off"},       {"P(NOT)", "precision_not"},
    {"R(NOT)", "recall_not"},    {"F1(NOT)", "f1_not"},
    {"macro-F1", "macro_f1"},    {"accuracy", "accuracy"},
};

// Works for const and mutable reports.
template <typename Report>
auto RealField(Report& r, std::string_view key) -> decltype(&r.accuracy) {
  if (key == "precision_off") return &r.offensive.precision;
  if (key == "recall_off") return &r.offensive.recall;
  if (key == "f1_off") return &r.offensive.f1;
  if (key == "precision_not") return &r.not_offensive.precision;
  if (key == "recall_not") return &r.not_offensive.recall;
  if (key == "f1_not") return &r.not_offensive.f1;
  if (key == "macro_f1") return &r.macro_f1;
  if (key == "accuracy") return &r.accuracy;
  return nullptr;
}

size_t* CountField(MetricsReport& r, std::string_view key) {
  if (key == "tp") return &r.confusion.tp;
  if (key == "fp") return &r.confusion.fp;
  if (key == "fn") return &r.confusion.fn;
  if (key == "tn") return &r.confusion.tn;
  return nullptr;
}

double RealValue(const MetricsReport& r, std::string_view key) {
  return *RealField(r, key);
}

}  // namespace

ConfusionMatrix Confusion(std::span<const Label> gold,
                          std::span<const Label> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                std::to_string(gold.size()) + " gold labels vs " +
                    std::to_string(pred.size()) + " predictions");
  }
  if (gold.empty()) throw Error(ErrorKind::kEmptyDataset, "nothing to score");
  ConfusionMatrix cm;
  for (size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == Label::kOffensive;
    const bool p = pred[i] == Label::kOffensive;
    if (g && p) {
      ++cm.tp;
    } else if (p) {
      ++cm.fp;
    } else if (g) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

MetricsReport ComputeMetrics(const ConfusionMatrix& cm, std::string model_tag) {
  if (cm.total() == 0) {
    throw Error(ErrorKind::kEmptyDataset, "empty confusion matrix");
  }
  MetricsReport r;
  r.model_tag = std::move(model_tag);
  r.confusion = cm;
  r.offensive = PositiveMetrics(cm);
  r.not_offensive = PositiveMetrics(cm.Swapped());
  r.macro_f1 = (r.offensive.f1 + r.not_offensive.f1) / 2.0;
  r.accuracy = Ratio(cm.tp + cm.tn, cm.total());
  return r;
}

std::string FormatFixed4(double v) {
  char buf[512];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

std::string RenderTable(std::span<const MetricsReport> reports) {
  size_t tag_width = 5;
  for (const auto& r : reports) tag_width = std::max(tag_width, r.model_tag.size());

  std::ostringstream out;
  auto pad_right = [&](std::string_view s, size_t width) {
    out << s << std::string(width > s.size() ? width - s.size() : 0, ' ');
  };
  auto pad_left = [&](std::string_view s, size_t width) {
    out << std::string(width > s.size() ? width - s.size() : 0, ' ') << s;
  };
  pad_right("model", tag_width);
  for (const auto& c : kColumns) {
    out << "  ";
    pad_left(c.header, std::max<size_t>(c.header.size(), 6));
  }
  out << '\n';
  for (const auto& r : reports) {
    pad_right(r.model_tag, tag_width);
    for (const auto& c : kColumns) {
      out << "  ";
      pad_left(FormatFixed4(RealValue(r, c.key)),
               std::max<size_t>(c.header.size(), 6));
    }
    out << '\n';
  }
  return out.str();
}

std::string RenderDump(std::span<const MetricsReport> reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    for (const auto& c : kColumns) {
      out << r.model_tag << '.' << c.key << '=' << Shortest(RealValue(r, c.key))
          << '\n';
    }
    out << r.model_tag << ".tp=" << r.confusion.tp << '\n';
    out << r.model_tag << ".fp=" << r.confusion.fp << '\n';
    out << r.model_tag << ".fn=" << r.confusion.fn << '\n';
    out << r.model_tag << ".tn=" << r.confusion.tn << '\n';
  }
  return out.str();
}

std::vector<MetricsReport> ParseDump(std::string_view text) {
  std::vector<MetricsReport> reports;
  std::map<std::string, size_t, std::less<>> index;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto fail = [&](std::string_view why) {
      throw Error(ErrorKind::kInvalidArgument,
                  "dump line " + std::to_string(line_no) + ": " +
                      std::string(why));
    };
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail("missing '='");
    const std::string_view lhs = line.substr(0, eq);
    const std::string_view value = line.substr(eq + 1);
    const size_t dot = lhs.rfind('.');
    if (dot == std::string_view::npos || dot == 0) fail("missing model tag");
    const std::string tag(lhs.substr(0, dot));
    const std::string_view key = lhs.substr(dot + 1);

    auto it = index.find(tag);
    if (it == index.end()) {
      it = index.emplace(tag, reports.size()).first;
      reports.push_back({});
      reports.back().model_tag = tag;
    }
    MetricsReport& r = reports[it->second];
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (double* d = RealField(r, key)) {
      const auto res = std::from_chars(first, last, *d);
      if (res.ec != std::errc() || res.ptr != last) fail("bad real value");
    } else if (size_t* n = CountField(r, key)) {
      const auto res = std::from_chars(first, last, *n);
      if (res.ec != std::errc() || res.ptr != last) fail("bad count value");
    } else {
      fail("unknown metric '" + std::string(key) + "'");
    }
  }
  return reports;
}

std::vector<BenchmarkSpec> DefaultBenchmarkSpecs() {
  std::vector<BenchmarkSpec> specs;
  for (ModelKind kind : kAllModelKinds) {
    specs.push_back({kind, TrainConfig::Defaults(kind)});
  }
  return specs;
}

std::vector<MetricsReport> Benchmark(const Dataset& train, const Dataset& test,
                                     std::span<const BenchmarkSpec> specs,
                                     const BenchmarkOptions& options) {
  if (specs.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no models to benchmark");
  }
  if (!train.labeled() || !test.labeled()) {
    throw Error(ErrorKind::kInvalidArgument,
                "benchmark needs labeled train and test sets");
  }
  const Normalizer normalizer(options.normalizer);
  auto normalize_all = [&](const Dataset& ds) {
    std::vector<std::string> out;
    out.reserve(ds.size());
    for (const auto& t : ds.records()) out.push_back(normalizer.Normalize(t.text));
    return out;
  };
  const std::vector<std::string> train_text = normalize_all(train);
  const std::vector<std::string> test_text = normalize_all(test);

  const Featurizer featurizer =
      Featurizer::Fit(train_text, options.features, options.ngram_range);
  const std::vector<SparseVector> x_train = featurizer.TransformAll(train_text);
  const std::vector<SparseVector> x_test = featurizer.TransformAll(test_text);
  const std::vector<Label> y_train = train.Labels();
  const TrainingSet data(x_train, y_train);

  std::vector<MetricsReport> reports;
  for (const auto& spec : specs) {
    TrainConfig cfg = spec.config;
    cfg.seed = options.seed;
    const Model model = Train(spec.kind, data, cfg);
    std::vector<Label> pred;
    pred.reserve(x_test.size());
    for (const auto& x : x_test) pred.push_back(model.Predict(x).label);
    // Test labels are consulted only here, after prediction.
    const std::vector<Label> gold = test.Labels();
    reports.push_back(ComputeMetrics(Confusion(gold, pred),
                                     std::string(ModelKindName(spec.kind))));
  }
  return reports;
}

}  // namespace offdetect
