#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gesture/classifiers.hpp"
#include "gesture/errors.hpp"
#include "gesture/evaluation.hpp"
#include "gesture/features.hpp"
#include "gesture/harness.hpp"
#include "gesture/skeleton.hpp"

namespace {

using namespace gesture;

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kComputation = 3 };

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

// Data goes to the file when one is named, otherwise to stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else write_text(path, text);
}

double training_accuracy(const Model& model, const LabeledDataset& data) {
  std::size_t hit = 0;
  for (const Sample& s : data.samples) hit += predict(model, s.features).label == s.label;
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// `algorithm,<dataset>...` header, then one row of scores per algorithm.
std::pair<std::vector<std::string>, ScoreGrid> parse_scores(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> names;
  ScoreGrid scores;
  std::string line;
  std::size_t line_no = 0, columns = 0;
  auto cells_of = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ls(l);
    for (std::string c; std::getline(ls, c, ',');) {
      const auto b = c.find_first_not_of(" \t\r");
      const auto e = c.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : c.substr(b, e - b + 1));
    }
    return cells;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = cells_of(line);
    if (columns == 0) {
      if (cells.size() < 2) throw InputError("scores line 1: expected 'algorithm,<dataset>...'");
      columns = cells.size();
      continue;
    }
    if (cells.size() != columns)
      throw InputError("scores line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " cells");
    names.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      double v = 0.0;
      const auto& c = cells[i];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc{} || ptr != c.data() + c.size() || !std::isfinite(v))
        throw InputError("scores line " + std::to_string(line_no) + ": bad score '" + c + "'");
      row.push_back(v);
    }
    scores.push_back(std::move(row));
  }
  if (scores.size() < 2) throw InputError("scores need at least two algorithms");
  return {names, scores};
}

struct ExtractArgs {
  std::string input, mode = "single", out;
};
struct TrainArgs {
  std::string features, model, out;
  std::uint64_t seed = 0;
  double sigma = 1.0, c = 10.0, bootstrap_fraction = 0.30;
  std::size_t trees = 100, k = 1;
};
struct PredictArgs {
  std::string model, input;
};
struct EvaluateArgs {
  std::string model, features, report, confusion;
};
struct FriedmanArgs {
  std::string scores;
};
struct GenArgs {
  std::string config, out_dir, mode, templates, classes, interaction;
  std::optional<std::size_t> samples, frames;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
  bool features = false;
};
struct ExperimentArgs {
  std::string config, classifier, out;
  std::optional<std::uint64_t> seed;
  bool timings = false;
};
struct RoundTripArgs {
  std::string input;
};

int run_extract(const ExtractArgs& a) {
  const FeatureKind kind = parse_feature_kind(a.mode);
  const SkeletonSequence seq = read_skeleton_file(a.input);
  emit(a.out, feature_matrix_to_csv(sequence_features(seq, kind), feature_header(kind), true));
  return kOk;
}

int run_train(const TrainArgs& a) {
  const LabeledDataset data = load_feature_manifest(a.features);
  const ClassifierKind kind = parse_classifier_kind(a.model);
  Model model;
  if (kind == ClassifierKind::svm) {
    SvmParams p;
    p.sigma = a.sigma;
    p.c = a.c;
    model = svm_train(data, p);
  } else if (kind == ClassifierKind::edt) {
    EdtParams p;
    p.trees = a.trees;
    p.bootstrap_fraction = a.bootstrap_fraction;
    p.seed = a.seed;
    model = edt_train(data, p);
  } else {
    model = knn_train(data, a.k);
  }
  save_model(model, a.out);
  std::cout << "training accuracy: " << fixed6(training_accuracy(model, data)) << '\n';
  return kOk;
}

int run_predict(const PredictArgs& a) {
  const Model model = load_model(a.model);
  const auto x = flatten_sequence(read_feature_csv(a.input));
  const Prediction p = predict(model, x);
  std::cout << "predicted," << p.label << '\n';
  const auto& classes = model_classes(model);
  for (std::size_t c = 0; c < classes.size(); ++c) std::cout << classes[c] << ',' << format_double(p.scores[c]) << '\n';
  return kOk;
}

int run_evaluate(const EvaluateArgs& a) {
  const Model model = load_model(a.model);
  const LabeledDataset data = load_feature_manifest(a.features);
  std::vector<std::string> truth, predicted;
  for (const Sample& s : data.samples) {
    truth.push_back(s.label);
    predicted.push_back(predict(model, s.features).label);
  }
  std::vector<std::string> labels = model_classes(model);
  for (const auto& l : data.classes())
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  std::sort(labels.begin(), labels.end());
  const MetricsReport report = evaluate(confusion(truth, predicted, labels));
  emit(a.report, metrics_csv(report));
  if (!a.confusion.empty()) write_text(a.confusion, confusion_csv(report.confusion));
  return kOk;
}

int run_friedman(const FriedmanArgs& a) {
  const auto [names, scores] = parse_scores(read_text(a.scores));
  const RankGrid ranks = rank_algorithms(scores);
  std::cout << friedman_table(names, ranks, friedman(ranks));
  return kOk;
}

ExperimentConfig config_from(const std::string& path) { return path.empty() ? ExperimentConfig{} : load_config(path); }

int run_gen(const GenArgs& a) {
  if (!a.interaction.empty()) {
    const auto comma = a.interaction.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--interaction expects LEFT,RIGHT");
    const std::string left = a.interaction.substr(0, comma), right = a.interaction.substr(comma + 1);
    const auto [l, r] = generate_interaction(left, right, a.frames.value_or(90), a.seed.value_or(7));
    namespace fs = std::filesystem;
    fs::create_directories(a.out_dir);
    const std::string stem = left + "_" + right;
    write_skeleton_file((fs::path(a.out_dir) / (stem + "_left.txt")).string(), l);
    write_skeleton_file((fs::path(a.out_dir) / (stem + "_right.txt")).string(), r);
    return kOk;
  }
  ExperimentConfig c = config_from(a.config);
  if (!a.mode.empty()) c.feature_kind = parse_feature_kind(a.mode);
  if (!a.templates.empty()) c.templates = parse_template_set(a.templates);
  if (!a.classes.empty()) {
    c.classes.clear();
    std::stringstream ls(a.classes);
    for (std::string name; std::getline(ls, name, ',');) c.classes.push_back(name);
  }
  if (a.samples) c.samples_per_class = *a.samples;
  if (a.frames) c.frames = *a.frames;
  if (a.seed) c.seed = *a.seed;
  if (a.noise) c.noise_std = *a.noise;
  export_dataset(c, a.out_dir, a.features);
  return kOk;
}

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentConfig c = config_from(a.config);
  if (a.seed) {
    c.seed = *a.seed;
    c.edt.seed = *a.seed;
  }
  if (!a.classifier.empty()) c.classifier = parse_classifier_kind(a.classifier);
  emit(a.out, report_text(run_experiment(c), a.timings));
  return kOk;
}

int run_round_trip(const RoundTripArgs& a) {
  const SkeletonSequence seq = read_skeleton_file(a.input);
  const std::string text = serialize_skeleton_stream(seq);
  const SkeletonSequence back = parse_skeleton_stream(text);
  bool same = back.frames.size() == seq.frames.size();
  for (std::size_t f = 0; same && f < seq.frames.size(); ++f) same = back.frames[f].joints == seq.frames[f].joints;
  if (!same || serialize_skeleton_stream(back) != text) {
    std::cerr << "round-trip mismatch in " << a.input << '\n';
    return kComputation;
  }
  std::cout << "ok: " << seq.frames.size() << " frames round-trip exactly\n";
  return kOk;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("GESTURE_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::uint64_t s = 0;
  const std::string_view sv(v);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), s);
  if (ec != std::errc{} || ptr != sv.data() + sv.size()) throw InvalidArgument("GESTURE_SEED is not an unsigned integer");
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton gesture and interaction recognition toolkit"};
  app.require_subcommand(1, 1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract-features", "Per-frame features of a skeleton file as CSV");
  extract->add_option("--input", ex.input, "Skeleton text file")->required();
  extract->add_option("--mode", ex.mode, "single or two-person")->check(CLI::IsMember({"single", "two-person"}));
  extract->add_option("--out", ex.out, "Output CSV (stdout if omitted)");

  TrainArgs tr;
  bool seed_given = false;
  auto* train = app.add_subcommand("train", "Train a classifier from a feature manifest");
  train->add_option("--features", tr.features, "Manifest of filename,label lines")->required();
  train->add_option("--model", tr.model, "svm, edt or knn")->required()->check(CLI::IsMember({"svm", "edt", "knn"}));
  train->add_option("--out", tr.out, "Model file to write")->required();
  train->add_option("--seed", tr.seed, "Ensemble seed (default: $GESTURE_SEED or 0)")
      ->each([&](const std::string&) { seed_given = true; });
  train->add_option("--sigma", tr.sigma, "SVM Gaussian width");
  train->add_option("--c", tr.c, "SVM penalty");
  train->add_option("--trees", tr.trees, "Ensemble size");
  train->add_option("--bootstrap-fraction", tr.bootstrap_fraction, "Bootstrap size as a fraction of the data");
  train->add_option("--k", tr.k, "Neighbours (odd)");

  PredictArgs pr;
  auto* pred = app.add_subcommand("predict", "Classify one feature CSV");
  pred->add_option("--model", pr.model, "Model file")->required();
  pred->add_option("--input", pr.input, "Feature CSV of one sequence")->required();

  EvaluateArgs ev;
  auto* eval = app.add_subcommand("evaluate", "Metrics of a model on a labelled feature manifest");
  eval->add_option("--model", ev.model, "Model file")->required();
  eval->add_option("--features", ev.features, "Manifest of filename,label lines")->required();
  eval->add_option("--report", ev.report, "Metrics CSV (stdout if omitted)");
  eval->add_option("--confusion", ev.confusion, "Also write the confusion matrix as CSV");

  FriedmanArgs fr;
  auto* fried = app.add_subcommand("friedman", "Friedman test over an algorithm x dataset score grid");
  fried->add_option("--scores", fr.scores, "CSV: algorithm,<dataset>... then one row per algorithm")->required();

  GenArgs gen;
  auto* gens = app.add_subcommand("gen-synth", "Write a synthetic labelled dataset");
  gens->add_option("--config", gen.config, "Experiment config file");
  gens->add_option("--out-dir", gen.out_dir, "Output directory")->required();
  gens->add_flag("--features", gen.features, "Also write feature CSVs and features.csv");
  gens->add_option("--mode", gen.mode, "single or two-person")->check(CLI::IsMember({"single", "two-person"}));
  gens->add_option("--templates", gen.templates, "hand or interaction")->check(CLI::IsMember({"hand", "interaction"}));
  gens->add_option("--classes", gen.classes, "Comma-separated template names");
  gens->add_option("--samples", gen.samples, "Sequences per class");
  gens->add_option("--frames", gen.frames, "Frames per sequence");
  gens->add_option("--seed", gen.seed, "Seed (default: $GESTURE_SEED or 7)");
  gens->add_option("--noise", gen.noise, "Gaussian noise std in metres");
  gens->add_option("--interaction", gen.interaction, "LEFT,RIGHT: write one two-person interaction instead");

  ExperimentArgs xp;
  auto* exp = app.add_subcommand("experiment", "Generate, split, train and evaluate in one run");
  exp->add_option("--config", xp.config, "Experiment config file");
  exp->add_option("--classifier", xp.classifier, "Override the classifier")
      ->check(CLI::IsMember({"svm", "edt", "knn"}));
  exp->add_option("--seed", xp.seed, "Override the seed (default: $GESTURE_SEED)");
  exp->add_option("--out", xp.out, "Report file (stdout if omitted)");
  exp->add_flag("--timings", xp.timings, "Include wall-clock timings");

  RoundTripArgs rt;
  auto* round = app.add_subcommand("round-trip-check", "Check a skeleton file survives parse and serialize");
  round->add_option("--input", rt.input, "Skeleton text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto seed = env_seed();
    if (*extract) return run_extract(ex);
    if (*train) {
      if (!seed_given && seed) tr.seed = *seed;
      return run_train(tr);
    }
    if (*pred) return run_predict(pr);
    if (*eval) return run_evaluate(ev);
    if (*fried) return run_friedman(fr);
    if (*gens) {
      if (!gen.seed && seed) gen.seed = seed;
      return run_gen(gen);
    }
    if (*exp) {
      if (!xp.seed && seed) xp.seed = seed;
      return run_experiment_cmd(xp);
    }
    if (*round) return run_round_trip(rt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.family() == ErrorFamily::input ? kInput : kComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kUsage;
}
