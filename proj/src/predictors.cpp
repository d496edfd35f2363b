#include "smoothkl/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smoothkl {

std::vector<double> logit_probs(std::span<const double> g) {
  if (g.empty()) throw std::invalid_argument("empty logit vector");
  const double gmax = *std::max_element(g.begin(), g.end());
  std::vector<double> q(g.size());
  double z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    q[i] = std::exp(g[i] - gmax);
    z += q[i];
  }
  for (double& v : q) v /= z;
  return q;
}

std::vector<double> rlogit_probs(std::span<const double> g, const SmoothingLevel& level) {
  return unsmooth(logit_probs(g), level);
}

TaskLossMatrix::TaskLossMatrix(int k, std::vector<double> costs) : k_(k), costs_(std::move(costs)) {
  if (k < 2 || costs_.size() != static_cast<std::size_t>(k) * k) {
    throw std::invalid_argument("task loss matrix must be K x K with K >= 2");
  }
  for (double c : costs_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("task losses must be finite and nonnegative");
  }
}

TaskLossMatrix TaskLossMatrix::zero_one(int k) {
  std::vector<double> costs(static_cast<std::size_t>(k) * k, 1.0);
  for (int i = 0; i < k; ++i) costs[i * k + i] = 0.0;
  return TaskLossMatrix(k, std::move(costs));
}

int label(std::span<const double> probs, const TaskLossMatrix& cost) {
  if (probs.size() != static_cast<std::size_t>(cost.k())) {
    throw std::invalid_argument("probability vector does not match task loss dimension");
  }
  int best = 0;
  double best_risk = 0.0;
  for (int l = 0; l < cost.k(); ++l) {
    double risk = 0.0;
    for (int k = 0; k < cost.k(); ++k) risk += probs[k] * cost(l, k);
    if (l == 0 || risk < best_risk) {
      best = l;
      best_risk = risk;
    }
  }
  return best;
}

int label_zero_one_from_logits(std::span<const double> g, const LossSpec& spec) {
  if (g.empty()) throw std::invalid_argument("empty logit vector");
  if (spec.labels_by_argmin()) {
    return static_cast<int>(std::min_element(g.begin(), g.end()) - g.begin());
  }
  return static_cast<int>(std::max_element(g.begin(), g.end()) - g.begin());
}

DeviationReport deviation_metrics(std::span<const double> estimates, int k, MsorVariant variant) {
  if (k < 2 || estimates.empty() || estimates.size() % k != 0) {
    throw std::invalid_argument("deviation metrics need a nonempty n x K batch");
  }
  const std::size_t n = estimates.size() / k;
  std::size_t vectors_out = 0;
  std::size_t components_out = 0;
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bool any_out = false;
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double q = estimates[i * k + j];
      sum += q;
      if (q < -kComponentTolerance || q > 1.0 + kComponentTolerance) {
        ++components_out;
        any_out = true;
      }
      residual += std::max(std::abs(q - 0.5) - 0.5, 0.0);
    }
    if (any_out || std::abs(sum - 1.0) > kSumTolerance) ++vectors_out;
  }
  const double total = static_cast<double>(n) * k;
  DeviationReport report;
  report.opder = static_cast<double>(vectors_out) / n;
  report.oper = components_out / total;
  if (variant == MsorVariant::as_printed) {
    report.msor = report.oper / total * residual;
  } else {
    report.msor = components_out == 0 ? 0.0 : residual / components_out;
  }
  return report;
}

DeviationReport deviation_metrics(const std::vector<std::vector<double>>& estimates, MsorVariant variant) {
  if (estimates.empty()) throw std::invalid_argument("deviation metrics need a nonempty list");
  const std::size_t k = estimates.front().size();
  std::vector<double> flat;
  flat.reserve(estimates.size() * k);
  for (const auto& row : estimates) {
    if (row.size() != k) throw std::invalid_argument("estimates must share the class count");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return deviation_metrics(flat, static_cast<int>(k), variant);
}

}  // namespace smoothkl
