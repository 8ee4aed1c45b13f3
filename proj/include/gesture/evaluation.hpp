#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gesture {

/// K x K counts; rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  std::size_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * size() + predicted]; }
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * size() + predicted]; }

  std::size_t total() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t column_sum(std::size_t predicted) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> counts_;
};

/// Tallies (truth, predicted) pairs. Throws InvalidArgument on a length
/// mismatch or a label missing from `labels`.
ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted,
                          std::vector<std::string> labels);

/// Same, with the label set taken as the sorted union of both sequences.
ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted);

struct BinaryCounts {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fn + fp + tn; }
  friend bool operator==(const BinaryCounts&, const BinaryCounts&) = default;
};

/// One-vs-rest counts for class k.
BinaryCounts binary_reduce(const ConfusionMatrix& cm, std::size_t k);

struct MetricSet {
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double npv = 0.0;
  double accuracy = 0.0;
  double error_rate = 0.0;
  double f1 = 0.0;
  /// Set when some ratio was 0/0 and reported as 0.
  bool degenerate = false;

  double ppv() const { return precision; }
  double sensitivity() const { return recall; }
};

/// Precision, recall, specificity, NPV, accuracy, error rate and F1 from
/// one-vs-rest counts. Throws InvalidArgument when the total is zero.
MetricSet metrics(const BinaryCounts& b);

struct MetricsReport {
  ConfusionMatrix confusion;
  std::vector<MetricSet> per_class;
  /// Unweighted mean over classes; `degenerate` if any class was.
  MetricSet macro;
};

MetricsReport evaluate(const ConfusionMatrix& cm);

/// Header class,precision,recall,specificity,npv,accuracy,error_rate,f1,
/// one row per class and a final `macro` row.
std::string metrics_csv(const MetricsReport& report);

/// Header `truth,<label>...`, then one row of counts per true class.
std::string confusion_csv(const ConfusionMatrix& cm);

/// Confusion matrix and metrics as aligned plain text.
std::string metrics_text(const MetricsReport& report);

// ---------------------------------------------------------------------------
// Friedman test over C algorithms and D datasets
// ---------------------------------------------------------------------------

/// scores[c][d] for algorithm c on dataset d; higher is better.
using ScoreGrid = std::vector<std::vector<double>>;
using RankGrid = std::vector<std::vector<double>>;

/// Per dataset, rank 1 for the best score down to rank C; tied scores share
/// the average of the ranks they span.
RankGrid rank_algorithms(const ScoreGrid& scores);

struct FriedmanResult {
  std::size_t algorithms = 0;
  std::size_t datasets = 0;
  std::vector<double> average_ranks;
  double chi_squared = 0.0;
  double critical_value = 0.0;
  bool reject_null = false;
};

/// Upper 5% point of the chi-squared distribution, df 1..10.
double chi_squared_critical_05(std::size_t degrees_of_freedom);

/// chi^2 = 12D / (C(C+1)) * (sum_c R_c^2 - C(C+1)^2 / 4) against the 5%
/// critical value at C - 1 degrees of freedom.
FriedmanResult friedman(const RankGrid& ranks);

/// Algorithm, per-dataset ranks, R_c and chi^2, one row per algorithm.
std::string friedman_table(std::span<const std::string> algorithms, const RankGrid& ranks,
                           const FriedmanResult& result);

}  // namespace gesture
