#include "gesture/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "gesture/errors.hpp"

namespace gesture {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += at(truth, j);
  return s;
}

std::size_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += at(i, predicted);
  return s;
}

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted,
                          std::vector<std::string> labels) {
  if (truth.size() != predicted.size())
    throw InvalidArgument("label sequences differ in length: " + std::to_string(truth.size()) + " vs " +
                          std::to_string(predicted.size()));
  ConfusionMatrix cm(std::move(labels));
  auto index = [&](const std::string& label) {
    const auto& l = cm.labels();
    auto it = std::find(l.begin(), l.end(), label);
    if (it == l.end()) throw InvalidArgument("unknown label '" + label + "'");
    return static_cast<std::size_t>(it - l.begin());
  };
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.at(index(truth[i]), index(predicted[i]));
  return cm;
}

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted) {
  std::vector<std::string> labels(truth.begin(), truth.end());
  labels.insert(labels.end(), predicted.begin(), predicted.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return confusion(truth, predicted, std::move(labels));
}

BinaryCounts binary_reduce(const ConfusionMatrix& cm, std::size_t k) {
  if (k >= cm.size()) throw InvalidArgument("class index out of range");
  BinaryCounts b;
  b.tp = cm.at(k, k);
  b.fn = cm.row_sum(k) - b.tp;
  b.fp = cm.column_sum(k) - b.tp;
  b.tn = cm.total() - b.tp - b.fn - b.fp;
  return b;
}

MetricSet metrics(const BinaryCounts& b) {
  const std::size_t n = b.total();
  if (n == 0) throw InvalidArgument("metrics need at least one sample");
  MetricSet m;
  auto ratio = [&m](std::size_t num, std::size_t den) {
    if (den == 0) {
      m.degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(b.tp, b.tp + b.fp);
  m.recall = ratio(b.tp, b.tp + b.fn);
  m.specificity = ratio(b.tn, b.fp + b.tn);
  m.npv = ratio(b.tn, b.tn + b.fn);
  m.accuracy = ratio(b.tp + b.tn, n);
  m.error_rate = ratio(b.fp + b.fn, n);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * (m.precision * m.recall) / (m.precision + m.recall) : 0.0;
  return m;
}

MetricsReport evaluate(const ConfusionMatrix& cm) {
  MetricsReport report{cm, {}, {}};
  const std::size_t k = cm.size();
  if (k == 0) throw InvalidArgument("confusion matrix has no classes");
  for (std::size_t c = 0; c < k; ++c) report.per_class.push_back(metrics(binary_reduce(cm, c)));

  MetricSet& macro = report.macro;
  for (const MetricSet& m : report.per_class) {
    macro.precision += m.precision;
    macro.recall += m.recall;
    macro.specificity += m.specificity;
    macro.npv += m.npv;
    macro.accuracy += m.accuracy;
    macro.error_rate += m.error_rate;
    macro.f1 += m.f1;
    macro.degenerate = macro.degenerate || m.degenerate;
  }
  const auto kd = static_cast<double>(k);
  for (double* v : {&macro.precision, &macro.recall, &macro.specificity, &macro.npv, &macro.accuracy,
                    &macro.error_rate, &macro.f1})
    *v /= kd;
  return report;
}

namespace {

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
  return buf.data();
}

void metric_row(std::ostringstream& out, const std::string& name, const MetricSet& m) {
  out << name;
  for (double v : {m.precision, m.recall, m.specificity, m.npv, m.accuracy, m.error_rate, m.f1})
    out << ',' << fixed(v, 6);
  out << '\n';
}

}  // namespace

std::string metrics_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "class,precision,recall,specificity,npv,accuracy,error_rate,f1\n";
  for (std::size_t c = 0; c < report.per_class.size(); ++c)
    metric_row(out, report.confusion.labels()[c], report.per_class[c]);
  metric_row(out, "macro", report.macro);
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "truth";
  for (const auto& l : cm.labels()) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < cm.size(); ++i) {
    out << cm.labels()[i];
    for (std::size_t j = 0; j < cm.size(); ++j) out << ',' << cm.at(i, j);
    out << '\n';
  }
  return out.str();
}

std::string metrics_text(const MetricsReport& report) {
  const auto& cm = report.confusion;
  std::size_t width = 5;
  for (const auto& l : cm.labels()) width = std::max(width, l.size());
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };

  std::ostringstream out;
  out << "confusion matrix (rows = true, columns = predicted)\n" << pad("", width);
  for (std::size_t j = 0; j < cm.size(); ++j) out << ' ' << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < cm.size(); ++i) {
    out << pad(std::to_string(i + 1) + " " + cm.labels()[i], width + 3);
    for (std::size_t j = 0; j < cm.size(); ++j) out << ' ' << cm.at(i, j);
    out << '\n';
  }
  out << '\n' << pad("class", width + 3) << " precision recall specificity npv accuracy error_rate f1\n";
  auto row = [&](const std::string& name, const MetricSet& m) {
    out << pad(name, width + 3);
    for (double v : {m.precision, m.recall, m.specificity, m.npv, m.accuracy, m.error_rate, m.f1})
      out << ' ' << fixed(v, 4);
    out << (m.degenerate ? "  (0/0 reported as 0)" : "") << '\n';
  };
  for (std::size_t c = 0; c < report.per_class.size(); ++c) row(cm.labels()[c], report.per_class[c]);
  row("macro", report.macro);
  return out.str();
}

RankGrid rank_algorithms(const ScoreGrid& scores) {
  const std::size_t c_count = scores.size();
  if (c_count < 2) throw InvalidArgument("ranking needs at least 2 algorithms");
  const std::size_t d_count = scores.front().size();
  if (d_count == 0) throw InvalidArgument("ranking needs at least 1 dataset");
  for (const auto& row : scores)
    if (row.size() != d_count) throw InvalidArgument("score grid rows differ in length");

  RankGrid ranks(c_count, std::vector<double>(d_count, 0.0));
  std::vector<std::size_t> order(c_count);
  for (std::size_t d = 0; d < d_count; ++d) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a][d] > scores[b][d]; });
    for (std::size_t start = 0; start < c_count;) {
      std::size_t end = start + 1;
      while (end < c_count && scores[order[end]][d] == scores[order[start]][d]) ++end;
      // Positions start..end-1 hold ranks start+1..end; their mean is (start+1+end)/2.
      const double shared = static_cast<double>(start + 1 + end) / 2.0;
      for (std::size_t i = start; i < end; ++i) ranks[order[i]][d] = shared;
      start = end;
    }
  }
  return ranks;
}

double chi_squared_critical_05(std::size_t degrees_of_freedom) {
  static constexpr std::array<double, 10> kTable = {3.841,  5.991,  7.815,  9.488,  11.070,
                                                    12.592, 14.067, 15.507, 16.919, 18.307};
  if (degrees_of_freedom < 1 || degrees_of_freedom > kTable.size())
    throw InvalidArgument("no chi-squared critical value for df = " + std::to_string(degrees_of_freedom) +
                          " (table covers 1..10)");
  return kTable[degrees_of_freedom - 1];
}

FriedmanResult friedman(const RankGrid& ranks) {
  FriedmanResult r;
  r.algorithms = ranks.size();
  if (r.algorithms < 2) throw InvalidArgument("Friedman test needs at least 2 algorithms");
  r.datasets = ranks.front().size();
  if (r.datasets == 0) throw InvalidArgument("Friedman test needs at least 1 dataset");
  for (const auto& row : ranks) {
    if (row.size() != r.datasets) throw InvalidArgument("rank grid rows differ in length");
    r.average_ranks.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(r.datasets));
  }
  const auto c = static_cast<double>(r.algorithms);
  const auto d = static_cast<double>(r.datasets);
  double sum_sq = 0.0;
  for (double rc : r.average_ranks) sum_sq += rc * rc;
  r.chi_squared = std::max(0.0, 12.0 * d / (c * (c + 1.0)) * (sum_sq - c * (c + 1.0) * (c + 1.0) / 4.0));
  r.critical_value = chi_squared_critical_05(r.algorithms - 1);
  r.reject_null = r.chi_squared > r.critical_value;
  return r;
}

std::string friedman_table(std::span<const std::string> algorithms, const RankGrid& ranks,
                           const FriedmanResult& result) {
  if (algorithms.size() != ranks.size()) throw InvalidArgument("one name per algorithm required");
  std::size_t width = 11;
  for (const auto& a : algorithms) width = std::max(width, a.size() + 2);
  auto pad = [](std::string s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  auto rank_str = [](double v) {
    return v == static_cast<double>(static_cast<long long>(v)) ? std::to_string(static_cast<long long>(v))
                                                               : fixed(v, 4);
  };

  std::ostringstream out;
  out << pad("Algorithm", width);
  for (std::size_t d = 0; d < result.datasets; ++d) out << pad("Dataset " + std::to_string(d + 1), 11);
  out << pad("R_c", 9) << "chi^2\n";
  for (std::size_t c = 0; c < ranks.size(); ++c) {
    out << pad(algorithms[c], width);
    for (double v : ranks[c]) out << pad(rank_str(v), 11);
    out << pad(rank_str(result.average_ranks[c]), 9);
    if (c == 0) out << fixed(result.chi_squared, 4);
    out << '\n';
  }
  out << "critical value (df = " << result.algorithms - 1 << ", alpha = 0.05): " << fixed(result.critical_value, 3)
      << '\n';
  out << (result.reject_null ? "reject" : "fail to reject") << " the null hypothesis\n";
  return out.str();
}

}  // namespace gesture
