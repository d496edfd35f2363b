#pragma once

// Probability estimators on top of logits, labeling rules, and the rates at
// which R-logit estimates escape the probability simplex.

#include <span>
#include <vector>

#include "smoothkl/losses.hpp"
#include "smoothkl/smoothing.hpp"

namespace smoothkl {

// Softmax with max-shift.
std::vector<double> logit_probs(std::span<const double> g);

// Inverse-smoothed softmax. Sums to one; components lie in rlogit_range(level).
std::vector<double> rlogit_probs(std::span<const double> g, const SmoothingLevel& level);

// cost(j, k): loss of predicting class j when the truth is k.
class TaskLossMatrix {
 public:
  TaskLossMatrix(int k, std::vector<double> costs);
  static TaskLossMatrix zero_one(int k);

  int k() const { return k_; }
  double operator()(int predicted, int truth) const { return costs_[predicted * k_ + truth]; }

 private:
  int k_;
  std::vector<double> costs_;
};

// argmin_l sum_k probs_k cost(l, k); ties go to the smallest index. probs may be
// an R-logit output with components outside [0, 1].
int label(std::span<const double> probs, const TaskLossMatrix& cost);

// Zero-one labeling from raw logits: argmax, except argmin for LSLR with a > 1.
int label_zero_one_from_logits(std::span<const double> g, const LossSpec& spec);

enum class MsorVariant { as_printed, conditional_mean };

struct DeviationReport {
  double opder = 0.0;  // fraction of estimates outside the simplex
  double oper = 0.0;   // fraction of components outside [0, 1]
  double msor = 0.0;   // residual magnitude, see MsorVariant
};

// estimates: n rows of K values stored row-major. A component counts as outside
// [0, 1] when it misses the interval by more than kComponentTolerance.
//   as_printed:       MSoR = OPER / (nK) * sum (|q - 1/2| - 1/2)_+
//   conditional_mean: MSoR = sum (|q - 1/2| - 1/2)_+ / #(components outside)
DeviationReport deviation_metrics(std::span<const double> estimates, int k,
                                  MsorVariant variant = MsorVariant::as_printed);
DeviationReport deviation_metrics(const std::vector<std::vector<double>>& estimates,
                                  MsorVariant variant = MsorVariant::as_printed);

}  // namespace smoothkl
