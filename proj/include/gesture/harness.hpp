#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gesture/classifiers.hpp"
#include "gesture/dataset.hpp"
#include "gesture/evaluation.hpp"
#include "gesture/features.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

// ---------------------------------------------------------------------------
// Synthetic gesture templates
// ---------------------------------------------------------------------------

/// Offset from the base pose at normalised time t in [0, 1].
struct Keyframe {
  double t = 0.0;
  Vec3 offset;
};

/// Piecewise-linear offset path of one joint; constant before the first and
/// after the last key.
struct JointTrack {
  Joint joint = Joint::HipCenter;
  std::vector<Keyframe> keys;

  Vec3 offset_at(double t) const;
};

inline constexpr double kMinSensorDepth = 1.2;
inline constexpr double kMaxSensorDepth = 3.5;

struct GestureTemplate {
  std::string name;
  Frame base_pose;
  std::vector<JointTrack> tracks;
  double noise_std = 0.01;

  /// Noise-free pose at time t.
  Frame pose_at(double t) const;
};

/// Upright figure facing the sensor, hip centre at (x, 0, depth).
Frame standing_pose(double x = 0.0, double depth = 2.5);

/// Reflects x and swaps left/right joints, turning a right-side performer
/// into a left-side one.
GestureTemplate mirrored(const GestureTemplate& tmpl);

enum class TemplateSet {
  hand,         // single-person hand gestures (twenty, named after the usual list)
  interaction,  // per-person actions of two-person interactions (eight)
};

TemplateSet parse_template_set(const std::string& name);
std::string to_string(TemplateSet set);

const std::vector<GestureTemplate>& builtin_templates(TemplateSet set);
const GestureTemplate& find_template(TemplateSet set, const std::string& name);

/// The eight hand gestures of the default benchmark.
std::vector<std::string> benchmark_hand_gestures();

/// Ordered (left person, right person) action pairs shipped as presets.
struct InteractionPreset {
  std::string left;
  std::string right;
};
const std::vector<InteractionPreset>& interaction_presets();

/// T frames at uniformly spaced t with N(0, noise_std) added to every
/// coordinate. Throws DepthRangeViolation if any depth leaves [1.2, 3.5] m.
SkeletonSequence generate_sequence(const GestureTemplate& tmpl, std::size_t frames, std::uint64_t seed);

/// Both performers of an interaction; the left one is the mirrored template
/// placed on the other side of the scene. Each person gets its own stream.
std::pair<SkeletonSequence, SkeletonSequence> generate_interaction(const std::string& left_action,
                                                                   const std::string& right_action,
                                                                   std::size_t frames, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class ClassifierKind { svm, edt, knn };

ClassifierKind parse_classifier_kind(const std::string& name);
std::string to_string(ClassifierKind kind);

enum class PersonSide { right, left };

struct ExperimentConfig {
  FeatureKind feature_kind = FeatureKind::single;
  TemplateSet templates = TemplateSet::hand;
  /// Template names; empty means the default class list of `templates`.
  std::vector<std::string> classes;
  std::size_t samples_per_class = 30;
  std::size_t frames = 90;
  std::uint64_t seed = 7;
  double noise_std = 0.01;
  double split_fraction = 0.8;
  PersonSide side = PersonSide::right;
  ClassifierKind classifier = ClassifierKind::svm;
  SvmParams svm;
  EdtParams edt{.trees = 100, .bootstrap_fraction = 0.30, .seed = 7, .mode = BootstrapMode::resample};
  std::size_t knn_k = 1;

  /// Classes actually used: `classes`, or the set's default list.
  std::vector<std::string> resolved_classes() const;
  void validate() const;
};

/// Text form: a `gesture-experiment 1` line, then `key = value` lines; `#`
/// starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string to_text(const ExperimentConfig& config);

/// The synthetic sequence for sample `index` of `label`.
SkeletonSequence generate_sample(const ExperimentConfig& config, const std::string& label, std::size_t index);

/// samples_per_class sequences per class, featurised and flattened.
LabeledDataset build_dataset(const ExperimentConfig& config);

struct DataSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Stratified split: per class, round(fraction * n) samples (clamped to
/// 1..n-1) go to training. Throws StratifyError for a class with < 2 samples.
DataSplit split(const LabeledDataset& data, double fraction, std::uint64_t seed);

Model train_model(const LabeledDataset& data, const ExperimentConfig& config);

struct Timings {
  double generate_ms = 0.0;
  double train_ms = 0.0;
  double predict_ms = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t dimension = 0;
  MetricsReport metrics;
  Timings timings;
};

/// generate -> featurise -> split -> train -> predict -> evaluate.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Deterministic unless timings are included.
std::string report_text(const ExperimentReport& report, bool include_timings);

/// Writes one skeleton file per sequence plus `labels.csv` (filename,label).
/// With `features`, also one feature CSV per sequence and `features.csv`.
void export_dataset(const ExperimentConfig& config, const std::string& directory, bool features);

/// `filename,label` lines; relative file names resolve against the manifest's directory.
std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& path);

/// Loads each feature CSV listed in a manifest and flattens it.
LabeledDataset load_feature_manifest(const std::string& path);

}  // namespace gesture
