#include <algorithm>
#include <cmath>
#include <limits>

#include "gesture/classifiers.hpp"
#include "gesture/errors.hpp"

namespace gesture {

namespace {

constexpr double kTau = 1e-12;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Dense symmetric kernel matrix, shared by all one-vs-all machines.
class KernelMatrix {
public:
  KernelMatrix(const LabeledDataset& data, double sigma) : n_(data.size()), k_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      k_[i * n_ + i] = 1.0;
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double v = gaussian_kernel(data.samples[i].features, data.samples[j].features, sigma);
        k_[i * n_ + j] = v;
        k_[j * n_ + i] = v;
      }
    }
  }
  double operator()(std::size_t i, std::size_t j) const { return k_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {k_.data() + i * n_, n_}; }

private:
  std::size_t n_;
  std::vector<double> k_;
};

struct DualSolution {
  std::vector<double> alpha;
  double rho = 0.0;
};

// Dual of the soft-margin machine,
//   min 1/2 a'Qa - e'a   s.t. 0 <= a_i <= C, y'a = 0,   Q_ij = y_i y_j K_ij,
// by sequential pairwise optimisation with second-order working-set
// selection (Fan, Chen, Lin 2005).
DualSolution solve_dual(const KernelMatrix& kernel, std::span<const int> y, const SvmParams& params) {
  const std::size_t n = y.size();
  const double c = params.c;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  auto at_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  auto q = [&](std::size_t a, std::size_t b) { return y[a] * y[b] * kernel(a, b); };

  const std::size_t max_iter = params.max_iterations_per_sample * n;
  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter)
      throw ConvergenceFailure("SVM solver did not converge in " + std::to_string(max_iter) + " iterations");

    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool up = y[t] > 0 ? !at_upper(t) : !at_lower(t);
      if (up && v > g_max) {
        g_max = v;
        i = t;
      }
    }
    if (i == n) break;

    double g_max2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const bool low = y[t] > 0 ? !at_lower(t) : !at_upper(t);
      if (!low) continue;
      const double v = y[t] * grad[t];
      g_max2 = std::max(g_max2, v);
      const double grad_diff = g_max + v;
      if (grad_diff > 0.0) {
        double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (g_max + g_max2 < params.tolerance || j == n) break;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double d_i = alpha[i] - old_i;
    const double d_j = alpha[j] - old_j;
    const auto k_i = kernel.row(i);
    const auto k_j = kernel.row(j);
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * k_i[t] * d_i + y[j] * k_j[t] * d_j);
  }

  // Threshold from free variables, or the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (at_upper(t)) {
      if (y[t] < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (at_lower(t)) {
      if (y[t] > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;
  return {std::move(alpha), rho};
}

}  // namespace

double gaussian_kernel(std::span<const double> a, std::span<const double> b, double sigma) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  return std::exp(-squared_distance(a, b) / (2.0 * sigma * sigma));
}

SvmModel svm_train(const LabeledDataset& data, const SvmParams& params) {
  if (!(params.sigma > 0.0)) throw InvalidArgument("SVM kernel width must be positive");
  if (!(params.c > 0.0)) throw InvalidArgument("SVM penalty C must be positive");
  if (!(params.tolerance > 0.0)) throw InvalidArgument("SVM tolerance must be positive");
  const EncodedLabels enc = encode_for_training(data);

  const auto& first = data.samples.front().features;
  const bool all_identical = std::all_of(data.samples.begin(), data.samples.end(),
                                         [&](const Sample& s) { return s.features == first; });
  if (all_identical) throw TrainingDegenerate("all training vectors are identical but labels differ");

  const KernelMatrix kernel(data, params.sigma);
  const std::size_t n = data.size();

  SvmModel model;
  model.params = params;
  model.dimension = data.dimension();
  model.classes = enc.classes;

  std::vector<DualSolution> solutions;
  std::vector<bool> used(n, false);
  std::vector<int> y(n);
  for (std::size_t cls = 0; cls < enc.classes.size(); ++cls) {
    for (std::size_t t = 0; t < n; ++t) y[t] = enc.targets[t] == cls ? 1 : -1;
    solutions.push_back(solve_dual(kernel, y, params));
    for (std::size_t t = 0; t < n; ++t)
      if (solutions.back().alpha[t] > 0.0) used[t] = true;
  }

  std::vector<std::size_t> pool_index(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (!used[t]) continue;
    pool_index[t] = model.support_vectors.size();
    model.support_vectors.push_back(data.samples[t].features);
  }

  for (std::size_t cls = 0; cls < enc.classes.size(); ++cls) {
    BinaryMachine machine;
    machine.bias = -solutions[cls].rho;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = solutions[cls].alpha[t];
      if (a <= 0.0) continue;
      machine.support.push_back(pool_index[t]);
      machine.coef.push_back(enc.targets[t] == cls ? a : -a);
    }
    model.machines.push_back(std::move(machine));
  }
  return model;
}

SvmPrediction svm_predict(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) throw DimensionMismatch(model.dimension, x.size());
  std::vector<double> k(model.support_vectors.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = gaussian_kernel(model.support_vectors[i], x, model.params.sigma);

  SvmPrediction out;
  out.scores.reserve(model.machines.size());
  for (const BinaryMachine& m : model.machines) {
    double f = m.bias;
    for (std::size_t s = 0; s < m.support.size(); ++s) f += m.coef[s] * k[m.support[s]];
    out.scores.push_back(f);
  }
  // max_element keeps the first maximum, i.e. the smallest label on ties.
  const auto best = std::max_element(out.scores.begin(), out.scores.end());
  out.label = model.classes[static_cast<std::size_t>(best - out.scores.begin())];
  return out;
}

}  // namespace gesture
