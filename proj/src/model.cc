#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "offdetect/checksum.h"
#include "offdetect/classifiers.h"
#include "offdetect/error.h"

namespace offdetect {
namespace {

constexpr std::string_view kMagic = "offdetect-model";
constexpr std::string_view kVersion = "v1";

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void Corrupt(const std::string& msg) {
  throw Error(ErrorKind::kCorruptModel, msg);
}

std::string_view EnsembleKindName(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kBagging: return "bagging";
    case EnsembleKind::kRandomForest: return "rforest";
    case EnsembleKind::kAdaBoost: return "adaboost";
  }
  return "?";
}

void WriteTree(const DecisionTree& tree, std::ostream& out) {
  out << "tree " << tree.nodes().size() << '\n';
  for (const TreeNode& n : tree.nodes()) {
    out << n.feature << ' ' << FormatDouble(n.threshold) << ' ' << n.left << ' '
        << n.right << ' ' << LabelName(n.label) << ' '
        << FormatDouble(n.class_counts[0]) << ' '
        << FormatDouble(n.class_counts[1]) << '\n';
  }
}

void WritePayload(const Model& model, std::ostream& out) {
  if (const auto* lin = std::get_if<LinearModel>(&model.get())) {
    out << "linear "
        << (lin->kind == LinearKind::kLogistic ? "logistic" : "hinge") << '\n';
    out << "epochs " << lin->epochs << '\n';
    out << "bias " << FormatDouble(lin->bias) << '\n';
    size_t nnz = 0;
    for (double w : lin->weights) nnz += w != 0.0;
    out << "weights " << nnz << '\n';
    for (size_t j = 0; j < lin->weights.size(); ++j) {
      if (lin->weights[j] != 0.0) {
        out << j << ' ' << FormatDouble(lin->weights[j]) << '\n';
      }
    }
  } else if (const auto* tree = std::get_if<DecisionTree>(&model.get())) {
    WriteTree(*tree, out);
  } else {
    const auto& ens = std::get<Ensemble>(model.get());
    out << "ensemble " << EnsembleKindName(ens.kind) << ' '
        << (ens.combiner == Combiner::kMajorityVote ? "vote" : "weighted")
        << ' ' << ens.members.size() << '\n';
    for (size_t m = 0; m < ens.members.size(); ++m) {
      out << "member " << FormatDouble(ens.member_weights[m]) << '\n';
      WriteTree(ens.members[m], out);
    }
  }
}

// Line/field reader over the verified body.
class Reader {
 public:
  explicit Reader(std::string_view body) : body_(body) {}

  std::vector<std::string_view> Line() {
    if (pos_ >= body_.size()) Corrupt("unexpected end of model payload");
    size_t end = body_.find('\n', pos_);
    if (end == std::string_view::npos) end = body_.size();
    std::string_view line = body_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    std::vector<std::string_view> fields;
    size_t i = 0;
    while (i <= line.size()) {
      size_t j = line.find(' ', i);
      if (j == std::string_view::npos) j = line.size();
      fields.push_back(line.substr(i, j - i));
      i = j + 1;
    }
    return fields;
  }

  // Line `key value...` with exactly `n` values.
  std::vector<std::string_view> Keyed(std::string_view key, size_t n) {
    auto f = Line();
    if (f.size() != n + 1 || f[0] != key) {
      Corrupt("line " + std::to_string(line_no_) + ": expected '" +
              std::string(key) + "'");
    }
    f.erase(f.begin());
    return f;
  }

  bool done() const { return pos_ >= body_.size(); }

 private:
  std::string_view body_;
  size_t pos_ = 0;
  int line_no_ = 0;
};

template <typename T>
T ParseInt(std::string_view s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    Corrupt("bad integer '" + std::string(s) + "'");
  }
  return v;
}

double ParseDouble(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    Corrupt("bad number '" + std::string(s) + "'");
  }
  return v;
}

Label ParseLabelField(std::string_view s) {
  for (Label l : kAllLabels) {
    if (s == LabelName(l)) return l;
  }
  Corrupt("bad label '" + std::string(s) + "'");
}

DecisionTree ReadTree(Reader& in, size_t dim, Label majority) {
  const auto n = ParseInt<size_t>(in.Keyed("tree", 1)[0]);
  std::vector<TreeNode> nodes(n);
  for (auto& node : nodes) {
    const auto f = in.Line();
    if (f.size() != 7) Corrupt("bad tree node line");
    node.feature = ParseInt<int32_t>(f[0]);
    node.threshold = ParseDouble(f[1]);
    node.left = ParseInt<int32_t>(f[2]);
    node.right = ParseInt<int32_t>(f[3]);
    node.label = ParseLabelField(f[4]);
    node.class_counts = {ParseDouble(f[5]), ParseDouble(f[6])};
  }
  try {
    return DecisionTree(std::move(nodes), dim, majority);
  } catch (const Error& e) {
    Corrupt(e.detail());
  }
}

Model::Variant ReadPayload(Reader& in, ModelKind kind, size_t dim,
                           Label majority) {
  switch (kind) {
    case ModelKind::kLogReg:
    case ModelKind::kSvm: {
      LinearModel lin;
      const auto k = in.Keyed("linear", 1)[0];
      lin.kind = kind == ModelKind::kLogReg ? LinearKind::kLogistic
                                            : LinearKind::kHingeSvm;
      if (k != (kind == ModelKind::kLogReg ? "logistic" : "hinge")) {
        Corrupt("linear kind does not match model kind");
      }
      lin.epochs = ParseInt<int>(in.Keyed("epochs", 1)[0]);
      lin.bias = ParseDouble(in.Keyed("bias", 1)[0]);
      lin.majority = majority;
      lin.weights.assign(dim, 0.0);
      const auto nnz = ParseInt<size_t>(in.Keyed("weights", 1)[0]);
      for (size_t i = 0; i < nnz; ++i) {
        const auto f = in.Line();
        if (f.size() != 2) Corrupt("bad weight line");
        const auto j = ParseInt<size_t>(f[0]);
        if (j >= dim) Corrupt("weight index out of range");
        lin.weights[j] = ParseDouble(f[1]);
      }
      return lin;
    }
    case ModelKind::kDecisionTree:
      return ReadTree(in, dim, majority);
    case ModelKind::kBagging:
    case ModelKind::kRandomForest:
    case ModelKind::kAdaBoost: {
      Ensemble ens;
      const auto f = in.Keyed("ensemble", 3);
      ens.kind = kind == ModelKind::kBagging        ? EnsembleKind::kBagging
                 : kind == ModelKind::kRandomForest ? EnsembleKind::kRandomForest
                                                    : EnsembleKind::kAdaBoost;
      if (f[0] != EnsembleKindName(ens.kind)) {
        Corrupt("ensemble kind does not match model kind");
      }
      if (f[1] == "vote") {
        ens.combiner = Combiner::kMajorityVote;
      } else if (f[1] == "weighted") {
        ens.combiner = Combiner::kWeightedSum;
      } else {
        Corrupt("bad combiner");
      }
      ens.majority = majority;
      ens.dim = dim;
      const auto n = ParseInt<size_t>(f[2]);
      for (size_t m = 0; m < n; ++m) {
        ens.member_weights.push_back(ParseDouble(in.Keyed("member", 1)[0]));
        ens.members.push_back(ReadTree(in, dim, majority));
      }
      return ens;
    }
  }
  Corrupt("unknown model kind");
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kSvm: return "svm";
    case ModelKind::kDecisionTree: return "dtree";
    case ModelKind::kBagging: return "bagging";
    case ModelKind::kRandomForest: return "rforest";
    case ModelKind::kAdaBoost: return "adaboost";
  }
  return "?";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  for (ModelKind k : kAllModelKinds) {
    if (ModelKindName(k) == name) return k;
  }
  return std::nullopt;
}

bool IsEnsembleKind(ModelKind kind) {
  return kind == ModelKind::kBagging || kind == ModelKind::kRandomForest ||
         kind == ModelKind::kAdaBoost;
}

TrainConfig TrainConfig::Defaults(ModelKind kind) {
  TrainConfig cfg;
  switch (kind) {
    case ModelKind::kBagging:
      cfg.n_estimators = 50;
      break;
    case ModelKind::kRandomForest:
      cfg.n_estimators = 100;
      break;
    case ModelKind::kAdaBoost:
      cfg.n_estimators = 50;
      cfg.learning_rate = 1.0;
      break;
    default:
      break;
  }
  return cfg;
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kInvalidArgument, msg);
  };
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) fail("l2_lambda must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail("learning_rate must be > 0");
  }
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (!(tolerance >= 0.0)) fail("tolerance must be >= 0");
  if (max_depth && *max_depth < 0) fail("max_depth must be >= 0");
  if (n_estimators < 1) fail("n_estimators must be >= 1");
  if (max_features && *max_features < 1) fail("max_features must be >= 1");
  if (!(positive_class_weight > 0.0) || !std::isfinite(positive_class_weight)) {
    fail("positive_class_weight must be > 0");
  }
}

TrainingSet::TrainingSet(std::span<const SparseVector> x,
                         std::span<const Label> y)
    : x_(x), y_(y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                std::to_string(x.size()) + " vectors vs " +
                    std::to_string(y.size()) + " labels");
  }
  if (x.empty()) throw Error(ErrorKind::kEmptyDataset, "no training examples");
  dim_ = x.front().dim();
  for (const auto& v : x) {
    if (v.dim() != dim_) {
      throw Error(ErrorKind::kDimMismatch,
                  "training vectors have differing dimensions");
    }
  }
  for (Label l : y) {
    if (l == Label::kOffensive) {
      ++counts_.offensive;
    } else {
      ++counts_.not_offensive;
    }
  }
}

void TrainingSet::RequireBothClasses() const {
  if (counts_.offensive == 0 || counts_.not_offensive == 0) {
    throw Error(ErrorKind::kSingleClass,
                "training labels contain a single class");
  }
}

size_t Model::dim() const {
  if (const auto* lin = std::get_if<LinearModel>(&model_)) return lin->weights.size();
  if (const auto* tree = std::get_if<DecisionTree>(&model_)) return tree->dim();
  return std::get<Ensemble>(model_).dim;
}

Label Model::majority() const {
  return std::visit(
      [](const auto& m) -> Label {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DecisionTree>) {
          return m.majority();
        } else {
          return m.majority;
        }
      },
      model_);
}

Prediction Model::Predict(const SparseVector& x) const {
  return std::visit([&x](const auto& m) { return m.Predict(x); }, model_);
}

std::string Model::Summary() const {
  if (const auto* lin = std::get_if<LinearModel>(&model_)) {
    return "epochs=" + std::to_string(lin->epochs);
  }
  if (const auto* tree = std::get_if<DecisionTree>(&model_)) {
    return "nodes=" + std::to_string(tree->nodes().size()) +
           " depth=" + std::to_string(tree->Depth());
  }
  return "members=" + std::to_string(std::get<Ensemble>(model_).members.size());
}

Model Train(ModelKind kind, const TrainingSet& data, const TrainConfig& cfg) {
  switch (kind) {
    case ModelKind::kLogReg: return Model(kind, TrainLogReg(data, cfg));
    case ModelKind::kSvm: return Model(kind, TrainSvm(data, cfg));
    case ModelKind::kDecisionTree: return Model(kind, TrainTree(data, cfg));
    case ModelKind::kBagging: return Model(kind, TrainBagging(data, cfg));
    case ModelKind::kRandomForest: return Model(kind, TrainRandomForest(data, cfg));
    case ModelKind::kAdaBoost: return Model(kind, TrainAdaBoost(data, cfg));
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown model kind");
}

void SaveModel(const Model& model, uint64_t vocab_fingerprint,
               std::ostream& out) {
  std::ostringstream body;
  body << kMagic << ' ' << kVersion << '\n';
  body << "kind " << ModelKindName(model.kind()) << '\n';
  body << "dim " << model.dim() << '\n';
  body << "vocab " << Hex64(vocab_fingerprint) << '\n';
  body << "majority " << LabelName(model.majority()) << '\n';
  WritePayload(model, body);
  const std::string text = body.str();
  out << text << "checksum " << Hex64(Fnv1a64(text)) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "failed to write model");
}

void SaveModel(const Model& model, uint64_t vocab_fingerprint,
               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  SaveModel(model, vocab_fingerprint, out);
}

LoadedModel LoadModel(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  const size_t first_end = text.find('\n');
  const std::string_view header =
      std::string_view(text).substr(0, first_end == std::string::npos
                                           ? text.size()
                                           : first_end);
  const std::string magic = std::string(kMagic) + ' ';
  if (header.substr(0, magic.size()) != magic) Corrupt("not a model file");
  if (first_end == std::string::npos) Corrupt("truncated model file");
  if (header.substr(magic.size()) != kVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "model format version '" +
                    std::string(header.substr(magic.size())) + "'");
  }

  // Trailer: the last line must be `checksum <hex>`.
  if (text.empty() || text.back() != '\n') Corrupt("truncated model file");
  const size_t trailer = text.rfind('\n', text.size() - 2);
  if (trailer == std::string::npos) Corrupt("truncated model file");
  const std::string_view body = std::string_view(text).substr(0, trailer + 1);
  const std::string_view last = std::string_view(text).substr(
      trailer + 1, text.size() - trailer - 2);
  if (last != "checksum " + Hex64(Fnv1a64(body))) {
    Corrupt("checksum mismatch or truncated model file");
  }

  Reader reader(body);
  reader.Line();  // header
  const auto kind_name = reader.Keyed("kind", 1)[0];
  const auto kind = ParseModelKind(kind_name);
  if (!kind) Corrupt("unknown model kind '" + std::string(kind_name) + "'");
  const auto dim = ParseInt<size_t>(reader.Keyed("dim", 1)[0]);
  const auto vocab_hex = reader.Keyed("vocab", 1)[0];
  const auto fingerprint = [&] {
    uint64_t v = 0;
    const auto res = std::from_chars(
        vocab_hex.data(), vocab_hex.data() + vocab_hex.size(), v, 16);
    if (vocab_hex.size() != 16 || res.ec != std::errc() ||
        res.ptr != vocab_hex.data() + vocab_hex.size()) {
      Corrupt("bad vocabulary fingerprint");
    }
    return v;
  }();
  const Label majority = ParseLabelField(reader.Keyed("majority", 1)[0]);
  Model model(*kind, ReadPayload(reader, *kind, dim, majority));
  if (!reader.done()) Corrupt("trailing data in model payload");
  return {std::move(model), fingerprint};
}

LoadedModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model file " + path);
  try {
    return LoadModel(in);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

}  // namespace offdetect
