#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gesture {

struct Sample {
  std::vector<double> features;
  std::string label;
};

/// Flattened per-sequence feature vectors with class labels. All vectors share
/// one length; the class list is the sorted set of distinct labels, and that
/// order is the tie-break order used by every classifier.
struct LabeledDataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  /// Feature length L; 0 for an empty dataset.
  std::size_t dimension() const { return samples.empty() ? 0 : samples.front().features.size(); }

  std::vector<std::string> classes() const;

  /// Throws DimensionMismatch if vector lengths differ.
  void check_consistent() const;

  /// Total scalar count, size() * dimension().
  std::size_t scalar_count() const { return size() * dimension(); }
};

/// Index of `label` in the sorted class list; throws InvalidArgument if absent.
std::size_t class_index(std::span<const std::string> classes, const std::string& label);

/// Dataset checks shared by all trainers: consistent lengths, >= 2 classes.
/// Returns the sorted class list and per-sample class indices.
struct EncodedLabels {
  std::vector<std::string> classes;
  std::vector<std::size_t> targets;
};
EncodedLabels encode_for_training(const LabeledDataset& data);

}  // namespace gesture
