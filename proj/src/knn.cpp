#include <algorithm>
#include <cmath>
#include <numeric>

#include "gesture/classifiers.hpp"
#include "gesture/errors.hpp"

namespace gesture {

KnnModel knn_train(const LabeledDataset& data, std::size_t k) {
  if (k == 0 || k % 2 == 0) throw InvalidArgument("k must be a positive odd integer, got " + std::to_string(k));
  EncodedLabels enc = encode_for_training(data);
  if (k > data.size())
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the training size " + std::to_string(data.size()));

  KnnModel model;
  model.k = k;
  model.dimension = data.dimension();
  model.classes = std::move(enc.classes);
  model.targets = std::move(enc.targets);
  model.points.reserve(data.size());
  for (const Sample& s : data.samples) model.points.push_back(s.features);
  return model;
}

namespace {

struct Neighbour {
  double sq_distance;
  std::size_t index;
};

std::vector<Neighbour> nearest(const KnnModel& model, std::span<const double> x) {
  std::vector<Neighbour> all;
  all.reserve(model.points.size());
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    double sum = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double diff = model.points[i][d] - x[d];
      sum += diff * diff;
    }
    all.push_back({sum, i});
  }
  const auto k = static_cast<std::ptrdiff_t>(model.k);
  std::partial_sort(all.begin(), all.begin() + k, all.end(), [](const Neighbour& a, const Neighbour& b) {
    return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.index < b.index);
  });
  all.resize(model.k);
  return all;
}

}  // namespace

KnnPrediction knn_classify(const KnnModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) throw DimensionMismatch(model.dimension, x.size());
  std::vector<std::size_t> votes(model.classes.size(), 0);
  std::vector<double> distance_sum(model.classes.size(), 0.0);
  for (const Neighbour& n : nearest(model, x)) {
    const std::size_t cls = model.targets[n.index];
    ++votes[cls];
    distance_sum[cls] += std::sqrt(n.sq_distance);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && distance_sum[c] < distance_sum[best])) best = c;
  }
  return {model.classes[best], std::move(votes)};
}

std::string knn_predict(const KnnModel& model, std::span<const double> x) { return knn_classify(model, x).label; }

}  // namespace gesture
