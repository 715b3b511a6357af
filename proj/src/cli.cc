#include "offdetect/cli.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offdetect/classifiers.h"
#include "offdetect/corpus.h"
#include "offdetect/eval.h"
#include "offdetect/features.h"
#include "offdetect/normalize.h"

#ifndef OFFDETECT_BUNDLED_RESOURCES
#define OFFDETECT_BUNDLED_RESOURCES "resources"
#endif

namespace offdetect {
namespace {

struct Options {
  std::string input;
  std::string output;
  std::string model_file;
  std::string vocab_file;
  std::string model;
  std::string models;
  std::string features = "combined";
  std::string resources;
  std::string steps = "all";
  std::string dump;
  std::string train;
  std::string test;
  std::optional<int> ngram_min;
  std::optional<int> ngram_max;
  uint64_t seed = TrainConfig{}.seed;
  bool header = false;

  // Hyperparameter overrides on top of the per-model defaults.
  std::optional<double> l2_lambda;
  std::optional<double> learning_rate;
  std::optional<int> max_epochs;
  std::optional<double> tolerance;
  std::optional<int> max_depth;
  std::optional<int> n_estimators;
  std::optional<double> positive_weight;
  bool no_bootstrap = false;
};

[[noreturn]] void Usage(const std::string& msg) {
  throw Error(ErrorKind::kInvalidArgument, msg);
}

std::string ValidModelNames() {
  std::string names;
  for (ModelKind k : kAllModelKinds) {
    if (!names.empty()) names += ", ";
    names += ModelKindName(k);
  }
  return names;
}

ModelKind ModelFromName(const std::string& name) {
  const auto kind = ParseModelKind(name);
  if (!kind) {
    Usage("unknown model '" + name + "'; valid models: " + ValidModelNames());
  }
  return *kind;
}

std::vector<ModelKind> ModelList(const std::string& list) {
  if (list.empty() || list == "all") {
    return {kAllModelKinds.begin(), kAllModelKinds.end()};
  }
  std::vector<ModelKind> kinds;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const ModelKind k = ModelFromName(name);
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
      Usage("model '" + name + "' listed twice");
    }
    kinds.push_back(k);
  }
  return kinds;
}

FeatureMode FeatureModeFromName(const std::string& name) {
  const auto mode = ParseFeatureMode(name);
  if (!mode) {
    Usage("unknown feature mode '" + name +
          "'; valid modes: count, tfidf-word, tfidf-char, combined");
  }
  return *mode;
}

std::optional<std::pair<int, int>> NgramRange(const Options& o,
                                              FeatureMode mode) {
  if (!o.ngram_min && !o.ngram_max) return std::nullopt;
  // A lone bound keeps the other bound of the mode's default range.
  const FeatureConfig base = mode == FeatureMode::kTfIdfChar
                                 ? FeatureConfig::TfIdfChar()
                             : mode == FeatureMode::kCount
                                 ? FeatureConfig::Count()
                                 : FeatureConfig::TfIdfWord();
  return std::make_pair(o.ngram_min.value_or(base.ngram_min),
                        o.ngram_max.value_or(base.ngram_max));
}

TrainConfig ConfigFor(ModelKind kind, const Options& o) {
  TrainConfig cfg = TrainConfig::Defaults(kind);
  cfg.seed = o.seed;
  if (o.l2_lambda) cfg.l2_lambda = *o.l2_lambda;
  if (o.learning_rate) cfg.learning_rate = *o.learning_rate;
  if (o.max_epochs) cfg.max_epochs = *o.max_epochs;
  if (o.tolerance) cfg.tolerance = *o.tolerance;
  if (o.max_depth) cfg.max_depth = *o.max_depth;
  if (o.n_estimators) cfg.n_estimators = *o.n_estimators;
  if (o.positive_weight) cfg.positive_class_weight = *o.positive_weight;
  if (o.no_bootstrap) cfg.bootstrap = false;
  cfg.Validate();
  return cfg;
}

NormalizerConfig NormalizerFor(const Options& o) {
  NormalizerConfig cfg;
  cfg.enabled_steps = ParseStepList(o.steps);
  cfg.resources = NormalizerResources::LoadDirectory(
      o.resources.empty() ? DefaultResourceDir() : o.resources);
  return cfg;
}

void Require(const std::string& value, const std::string& flag) {
  if (value.empty()) Usage(flag + " is required");
}

// "-" or empty means the caller's stream.
class Input {
 public:
  Input(const std::string& path, std::istream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorKind::kIo, "cannot open input " + path);
      stream_ = file_.get();
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) {
        throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
      }
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void Finish() {
    stream_->flush();
    if (!*stream_) throw Error(ErrorKind::kIo, "failed writing " + path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::vector<std::string> ReadLines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw Error(ErrorKind::kIo, "failed reading input");
  return lines;
}

Dataset LoadLabeled(const std::string& path, const Options& o,
                    std::istream& in) {
  LoadOptions load;
  load.has_header = o.header;
  Dataset ds;
  if (path == "-") {
    ds = ParseTsv(in, load);
  } else {
    ds = LoadTsv(path, load);
  }
  if (!ds.labeled()) Usage(path + " has no labels");
  return ds;
}

std::vector<std::string> NormalizeAll(const Normalizer& normalizer,
                                      const Dataset& ds) {
  std::vector<std::string> out;
  out.reserve(ds.size());
  for (const auto& t : ds.records()) out.push_back(normalizer.Normalize(t.text));
  return out;
}

struct LoadedPipeline {
  Featurizer featurizer;
  LoadedModel model;
};

LoadedPipeline LoadPipeline(const Options& o) {
  Require(o.model_file, "--model-file");
  Require(o.vocab_file, "--vocab-file");
  LoadedModel model = LoadModel(o.model_file);
  Featurizer featurizer = Featurizer::Load(o.vocab_file);
  if (model.vocab_fingerprint != featurizer.Fingerprint() ||
      model.model.dim() != featurizer.dim()) {
    throw Error(ErrorKind::kFingerprintMismatch,
                "model " + o.model_file + " was not trained with vocabulary " +
                    o.vocab_file);
  }
  return {std::move(featurizer), std::move(model)};
}

int CmdNormalize(const Options& o, std::istream& in, std::ostream& out) {
  const Normalizer normalizer(NormalizerFor(o));
  Input input(o.input, in);
  Output output(o.output, out);
  for (const auto& line : ReadLines(input.get())) {
    output.get() << normalizer.Normalize(line) << '\n';
  }
  output.Finish();
  return kExitOk;
}

int CmdTrain(const Options& o, std::istream& in, std::ostream& out) {
  Require(o.input, "--input");
  Require(o.model, "--model");
  Require(o.model_file, "--model-file");
  Require(o.vocab_file, "--vocab-file");
  const ModelKind kind = ModelFromName(o.model);
  const FeatureMode mode = FeatureModeFromName(o.features);
  const TrainConfig cfg = ConfigFor(kind, o);
  const Normalizer normalizer(NormalizerFor(o));

  const Dataset ds = LoadLabeled(o.input, o, in);
  const std::vector<std::string> texts = NormalizeAll(normalizer, ds);
  const Featurizer featurizer = Featurizer::Fit(texts, mode, NgramRange(o, mode));
  const std::vector<SparseVector> x = featurizer.TransformAll(texts);
  const std::vector<Label> y = ds.Labels();
  const Model model = Train(kind, TrainingSet(x, y), cfg);

  featurizer.Save(o.vocab_file);
  SaveModel(model, featurizer.Fingerprint(), o.model_file);

  const ClassCounts& c = ds.counts();
  const int classes = (c.offensive > 0) + (c.not_offensive > 0);
  out << "model=" << ModelKindName(kind) << " examples=" << ds.size()
      << " classes=" << classes << " (OFF=" << c.offensive
      << " NOT_OFF=" << c.not_offensive << ") features=" << FeatureModeName(mode)
      << " dim=" << featurizer.dim() << ' ' << model.Summary() << '\n';
  return kExitOk;
}

int CmdPredict(const Options& o, std::istream& in, std::ostream& out) {
  const LoadedPipeline p = LoadPipeline(o);
  const Normalizer normalizer(NormalizerFor(o));
  Input input(o.input, in);
  Output output(o.output, out);
  char buf[64];
  for (const auto& line : ReadLines(input.get())) {
    const Prediction pred =
        p.model.model.Predict(p.featurizer.Transform(normalizer.Normalize(line)));
    const auto res = std::to_chars(buf, buf + sizeof(buf), pred.score);
    output.get() << LabelName(pred.label) << '\t'
                 << std::string_view(buf, res.ptr - buf) << '\n';
  }
  output.Finish();
  return kExitOk;
}

void WriteDump(const std::string& path, std::span<const MetricsReport> reports) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f << RenderDump(reports);
  if (!f.flush()) throw Error(ErrorKind::kIo, "failed writing " + path);
}

int CmdEvaluate(const Options& o, std::istream& in, std::ostream& out) {
  Require(o.input, "--input");
  const LoadedPipeline p = LoadPipeline(o);
  const Normalizer normalizer(NormalizerFor(o));
  const Dataset ds = LoadLabeled(o.input, o, in);
  std::vector<Label> pred;
  for (const auto& text : NormalizeAll(normalizer, ds)) {
    pred.push_back(p.model.model.Predict(p.featurizer.Transform(text)).label);
  }
  const std::vector<MetricsReport> reports = {ComputeMetrics(
      Confusion(ds.Labels(), pred),
      std::string(ModelKindName(p.model.model.kind())))};
  Output output(o.output, out);
  output.get() << RenderTable(reports);
  output.Finish();
  WriteDump(o.dump, reports);
  return kExitOk;
}

int CmdBenchmark(const Options& o, std::istream& in, std::ostream& out) {
  Require(o.train, "--train");
  Require(o.test, "--test");
  std::vector<BenchmarkSpec> specs;
  for (ModelKind kind : ModelList(o.models)) {
    specs.push_back({kind, ConfigFor(kind, o)});
  }
  BenchmarkOptions options;
  options.features = FeatureModeFromName(o.features);
  options.ngram_range = NgramRange(o, options.features);
  options.seed = o.seed;
  options.normalizer = NormalizerFor(o);

  const Dataset train = LoadLabeled(o.train, o, in);
  const Dataset test = LoadLabeled(o.test, o, in);
  const std::vector<MetricsReport> reports =
      Benchmark(train, test, specs, options);
  Output output(o.output, out);
  output.get() << RenderTable(reports);
  output.Finish();
  WriteDump(o.dump, reports);
  return kExitOk;
}

void AddCommon(CLI::App* cmd, Options& o) {
  cmd->add_option("--resources", o.resources,
                   "Resource directory (default: $" + std::string(kResourcesEnv) +
                       " or the bundled tables)");
  cmd->add_option("--steps", o.steps,
                  "Normalization steps: all, none, or a comma list of "
                  "emoticons,emojis,hashtags,strip,letters,diacritics,"
                  "repeats,dialect,stopwords");
}

void AddFeatureFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--features", o.features,
                  "count | tfidf-word | tfidf-char | combined")
      ->capture_default_str();
  cmd->add_option("--ngram-min", o.ngram_min, "Smallest n-gram size");
  cmd->add_option("--ngram-max", o.ngram_max, "Largest n-gram size");
}

void AddTrainFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--l2", o.l2_lambda, "L2 strength for linear models");
  cmd->add_option("--learning-rate", o.learning_rate,
                  "Step size (linear) or shrinkage (AdaBoost)");
  cmd->add_option("--max-epochs", o.max_epochs, "Epoch cap for linear models");
  cmd->add_option("--tolerance", o.tolerance, "Objective decrease to stop at");
  cmd->add_option("--max-depth", o.max_depth, "Tree depth limit");
  cmd->add_option("--n-estimators", o.n_estimators, "Ensemble size");
  cmd->add_option("--positive-weight", o.positive_weight,
                  "Loss weight of the OFF class for linear models");
  cmd->add_flag("--no-bootstrap", o.no_bootstrap,
                "Train bagging/forest members on the full set");
  cmd->add_flag("--header", o.header, "TSV inputs start with a header row");
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kInvalidArgument: return kExitUsage;
    case ErrorKind::kFingerprintMismatch: return kExitFingerprint;
    default: return kExitData;
  }
}

std::string DefaultResourceDir() {
  if (const char* env = std::getenv(kResourcesEnv); env != nullptr && *env) {
    return env;
  }
  return OFFDETECT_BUNDLED_RESOURCES;
}

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Arabic offensive tweet detection", "offdetect"};
  app.require_subcommand(1);

  auto* normalize = app.add_subcommand("normalize", "Normalize raw text lines");
  normalize->add_option("--input", o.input, "Input file (default: stdin)");
  normalize->add_option("--output", o.output, "Output file (default: stdout)");
  AddCommon(normalize, o);

  auto* train = app.add_subcommand("train", "Train one model on a labeled TSV");
  train->add_option("--input", o.input, "Labeled TSV");
  train->add_option("--model", o.model, "Model: " + ValidModelNames());
  train->add_option("--model-file", o.model_file, "Model file to write");
  train->add_option("--vocab-file", o.vocab_file, "Vocabulary file to write");
  AddCommon(train, o);
  AddFeatureFlags(train, o);
  AddTrainFlags(train, o);

  auto* predict = app.add_subcommand("predict", "Label raw text lines");
  predict->add_option("--input", o.input, "Input file (default: stdin)");
  predict->add_option("--output", o.output, "Output file (default: stdout)");
  predict->add_option("--model-file", o.model_file, "Trained model");
  predict->add_option("--vocab-file", o.vocab_file, "Matching vocabulary");
  AddCommon(predict, o);

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a labeled TSV");
  evaluate->add_option("--input", o.input, "Labeled TSV");
  evaluate->add_option("--output", o.output, "Table output (default: stdout)");
  evaluate->add_option("--model-file", o.model_file, "Trained model");
  evaluate->add_option("--vocab-file", o.vocab_file, "Matching vocabulary");
  evaluate->add_option("--dump", o.dump, "Write key=value metrics here");
  evaluate->add_flag("--header", o.header, "TSV input starts with a header row");
  AddCommon(evaluate, o);

  auto* benchmark =
      app.add_subcommand("benchmark", "Train and score several models");
  benchmark->add_option("--train", o.train, "Labeled training TSV");
  benchmark->add_option("--test", o.test, "Labeled test TSV");
  benchmark->add_option("--models", o.models,
                        "Comma list of models (default: all six)");
  benchmark->add_option("--output", o.output, "Table output (default: stdout)");
  benchmark->add_option("--dump", o.dump, "Write key=value metrics here");
  AddCommon(benchmark, o);
  AddFeatureFlags(benchmark, o);
  AddTrainFlags(benchmark, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (normalize->parsed()) return CmdNormalize(o, in, out);
    if (train->parsed()) return CmdTrain(o, in, out);
    if (predict->parsed()) return CmdPredict(o, in, out);
    if (evaluate->parsed()) return CmdEvaluate(o, in, out);
    return CmdBenchmark(o, in, out);
  } catch (const Error& e) {
    err << "offdetect: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "offdetect: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace offdetect
