#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "gesture/classifiers.hpp"
#include "gesture/errors.hpp"
#include "gesture/rng.hpp"

namespace gesture {

namespace {

std::size_t majority(std::span<const std::size_t> counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = -1.0;  // sum over children of (sum of squared class counts) / size
};

class TreeBuilder {
public:
  TreeBuilder(std::span<const std::vector<double>> features, std::span<const std::size_t> targets,
              std::size_t class_count)
      : features_(features), targets_(targets), class_count_(class_count) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    DecisionTree tree;
    tree.nodes.emplace_back();
    struct Pending {
      std::size_t node;
      std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    stack.push_back({0, std::move(rows)});
    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();

      std::vector<std::size_t> counts(class_count_, 0);
      for (std::size_t r : p.rows) ++counts[targets_[r]];
      const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;

      std::optional<Split> split;
      if (!pure && p.rows.size() >= 2) split = best_split(p.rows);
      if (!split) {
        tree.nodes[p.node].label = majority(counts);
        continue;
      }

      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (std::size_t r : p.rows)
        (features_[r][split->feature] <= split->threshold ? left : right).push_back(r);

      const std::size_t left_id = tree.nodes.size();
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[p.node];
      node.feature = static_cast<std::int64_t>(split->feature);
      node.threshold = split->threshold;
      node.left = left_id;
      node.right = left_id + 1;
      stack.push_back({left_id + 1, std::move(right)});
      stack.push_back({left_id, std::move(left)});
    }
    return tree;
  }

private:
  // Minimising the weighted Gini impurity n_L G_L + n_R G_R is the same as
  // maximising S_L / n_L + S_R / n_R, S = sum of squared class counts. The
  // sums stay exact integers while sweeping.
  std::optional<Split> best_split(const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    std::vector<std::size_t> total(class_count_, 0);
    for (std::size_t r : rows) ++total[targets_[r]];
    std::uint64_t total_sq = 0;
    for (std::size_t c : total) total_sq += static_cast<std::uint64_t>(c) * c;

    std::optional<Split> best;
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(class_count_);
    const std::size_t dim = features_[rows.front()].size();
    for (std::size_t f = 0; f < dim; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return features_[a][f] < features_[b][f]; });
      std::fill(left.begin(), left.end(), 0);
      std::uint64_t left_sq = 0;
      std::uint64_t right_sq = total_sq;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t cls = targets_[order[i]];
        left_sq += 2 * left[cls] + 1;
        right_sq -= 2 * (total[cls] - left[cls]) - 1;
        ++left[cls];
        const double lo = features_[order[i]][f];
        const double hi = features_[order[i + 1]][f];
        if (!(lo < hi)) continue;
        const double n_left = static_cast<double>(i + 1);
        const double score = static_cast<double>(left_sq) / n_left + static_cast<double>(right_sq) / (static_cast<double>(n) - n_left);
        if (!best || score > best->score) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best = Split{f, threshold, score};
        }
      }
    }
    return best;
  }

  std::span<const std::vector<double>> features_;
  std::span<const std::size_t> targets_;
  std::size_t class_count_;
};

}  // namespace

std::size_t DecisionTree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  while (nodes[id].feature >= 0) {
    const Node& node = nodes[id];
    id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[id].label;
}

DecisionTree grow_tree(std::span<const std::vector<double>> features, std::span<const std::size_t> targets,
                       std::size_t class_count, std::span<const std::size_t> rows) {
  if (rows.empty()) throw InvalidBootstrap("cannot grow a tree from zero samples");
  return TreeBuilder(features, targets, class_count).build({rows.begin(), rows.end()});
}

std::vector<std::size_t> bootstrap_rows(const EdtParams& params, std::size_t tree, std::size_t sample_count) {
  std::vector<std::size_t> rows;
  if (params.mode == BootstrapMode::identity) {
    rows.resize(sample_count);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  const double wanted = params.bootstrap_fraction * static_cast<double>(sample_count);
  if (wanted < 1.0)
    throw InvalidBootstrap("bootstrap sample would be empty (" + std::to_string(params.bootstrap_fraction) + " x " +
                           std::to_string(sample_count) + " < 1)");
  const auto size = static_cast<std::size_t>(std::ceil(wanted));
  Rng rng(derive_seed(params.seed, tree));
  rows.reserve(size);
  for (std::size_t i = 0; i < size; ++i) rows.push_back(static_cast<std::size_t>(rng.below(sample_count)));
  return rows;
}

EnsembleModel edt_train(const LabeledDataset& data, const EdtParams& params) {
  if (params.trees == 0) throw InvalidArgument("ensemble needs at least one tree");
  if (!(params.bootstrap_fraction > 0.0 && params.bootstrap_fraction <= 1.0))
    throw InvalidBootstrap("bootstrap fraction must lie in (0, 1]");
  const EncodedLabels enc = encode_for_training(data);

  std::vector<std::vector<double>> features;
  features.reserve(data.size());
  for (const Sample& s : data.samples) features.push_back(s.features);

  EnsembleModel model;
  model.params = params;
  model.dimension = data.dimension();
  model.classes = enc.classes;
  model.trees.reserve(params.trees);
  for (std::size_t t = 0; t < params.trees; ++t) {
    const auto rows = bootstrap_rows(params, t, data.size());
    model.trees.push_back(grow_tree(features, enc.targets, enc.classes.size(), rows));
  }
  return model;
}

EdtPrediction edt_predict(const EnsembleModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) throw DimensionMismatch(model.dimension, x.size());
  EdtPrediction out;
  out.votes.assign(model.classes.size(), 0);
  for (const DecisionTree& tree : model.trees) ++out.votes[tree.predict(x)];
  out.label = model.classes[majority(out.votes)];
  return out;
}

}  // namespace gesture
