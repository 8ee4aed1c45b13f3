#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gesture/dataset.hpp"

namespace gesture {

// ---------------------------------------------------------------------------
// One-vs-all soft-margin SVM with a Gaussian kernel
// ---------------------------------------------------------------------------

/// exp(-|a - b|^2 / (2 sigma^2)).
double gaussian_kernel(std::span<const double> a, std::span<const double> b, double sigma);

struct SvmParams {
  double sigma = 1.0;
  double c = 10.0;
  /// Stop when the maximal KKT violation drops below this.
  double tolerance = 1e-3;
  /// Iteration cap is this times the sample count.
  std::size_t max_iterations_per_sample = 10000;
};

/// One class against the rest: f(x) = sum_i coef_i K(sv_i, x) + bias, where
/// coef_i = alpha_i * y_i and sv_i indexes SvmModel::support_vectors.
struct BinaryMachine {
  std::vector<std::size_t> support;
  std::vector<double> coef;
  double bias = 0.0;
};

struct SvmModel {
  SvmParams params;
  std::size_t dimension = 0;
  std::vector<std::string> classes;
  /// Union of the support vectors of all machines, in training order.
  std::vector<std::vector<double>> support_vectors;
  std::vector<BinaryMachine> machines;
};

struct SvmPrediction {
  std::string label;
  /// Decision value of each class's machine, in class order.
  std::vector<double> scores;
};

SvmModel svm_train(const LabeledDataset& data, const SvmParams& params = {});
SvmPrediction svm_predict(const SvmModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Bagged decision-tree ensemble
// ---------------------------------------------------------------------------

/// Axis-aligned binary tree; x goes left when x[feature] <= threshold.
struct DecisionTree {
  struct Node {
    std::int64_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t label = 0;  // class index at a leaf
  };
  std::vector<Node> nodes;

  std::size_t predict(std::span<const double> x) const;
};

/// Fully grown CART tree on rows `rows` of the data (duplicates allowed):
/// Gini splits until a node is pure or holds fewer than 2 samples.
DecisionTree grow_tree(std::span<const std::vector<double>> features, std::span<const std::size_t> targets,
                       std::size_t class_count, std::span<const std::size_t> rows);

enum class BootstrapMode {
  resample,  // ceil(fraction * n) draws with replacement
  identity,  // every training sample exactly once (test hook)
};

struct EdtParams {
  std::size_t trees = 100;
  double bootstrap_fraction = 0.30;
  std::uint64_t seed = 0;
  BootstrapMode mode = BootstrapMode::resample;
};

struct EnsembleModel {
  EdtParams params;
  std::size_t dimension = 0;
  std::vector<std::string> classes;
  std::vector<DecisionTree> trees;
};

struct EdtPrediction {
  std::string label;
  /// Tree votes per class, in class order; sums to the tree count.
  std::vector<std::size_t> votes;
};

/// Row indices of the bootstrap sample for tree `tree` (drawn from the stream
/// derive_seed(seed, tree)).
std::vector<std::size_t> bootstrap_rows(const EdtParams& params, std::size_t tree, std::size_t sample_count);

EnsembleModel edt_train(const LabeledDataset& data, const EdtParams& params = {});
EdtPrediction edt_predict(const EnsembleModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// k nearest neighbours
// ---------------------------------------------------------------------------

struct KnnModel {
  std::size_t k = 1;
  std::size_t dimension = 0;
  std::vector<std::string> classes;
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> targets;
};

/// Stores the training set; k must be odd, positive and at most the sample count.
KnnModel knn_train(const LabeledDataset& data, std::size_t k = 1);

/// Euclidean majority vote among the k nearest (distance ties by training
/// order); vote ties go to the smaller summed distance, then to label order.
std::string knn_predict(const KnnModel& model, std::span<const double> x);

struct KnnPrediction {
  std::string label;
  /// Neighbour count per class, in class order; sums to k.
  std::vector<std::size_t> votes;
};
KnnPrediction knn_classify(const KnnModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Any trained model
// ---------------------------------------------------------------------------

using Model = std::variant<SvmModel, EnsembleModel, KnnModel>;

struct Prediction {
  std::string label;
  /// SVM decision values, EDT vote counts, or kNN neighbour counts per class.
  std::vector<double> scores;
};

Prediction predict(const Model& model, std::span<const double> x);
std::string model_kind(const Model& model);
const std::vector<std::string>& model_classes(const Model& model);
std::size_t model_dimension(const Model& model);

/// Versioned text format; see docs in README. Doubles are written in
/// shortest round-trip form so a reload predicts bit-identically.
std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace gesture
