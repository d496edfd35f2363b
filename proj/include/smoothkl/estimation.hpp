#pragma once

// Empirical risk minimization of the linear binary model with full-batch Adam
// and multi-start, plus the error measures used to compare estimators.

#include <cstdint>
#include <span>
#include <vector>

#include "smoothkl/asymptotics.hpp"
#include "smoothkl/dataset.hpp"
#include "smoothkl/losses.hpp"

namespace smoothkl {

struct OptimizerConfig {
  double learning_rate_init = 0.01;
  double decay_factor = 0.31622776601683794;  // 10^{-1/2}
  int decay_every_epochs = 50;
  int epochs = 150;
  // Starts per fit; 0 selects 30 for MLSLR and LSQLR and 1 otherwise.
  int multistart = 0;
  double multistart_scatter_sd = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  // Trial index; selects the substream used for start points.
  std::uint64_t trial = 0;
  // Estimates with a larger norm are flagged as diverged.
  double divergence_cap = 1e3;

  void validate() const;
  int starts_for(const LossSpec& spec) const;
  double learning_rate(int epoch) const;
};

struct FitResult {
  std::vector<double> beta_hat;
  double final_empirical_risk = 0.0;
  int start_index_chosen = 0;
  int converged_epochs = 0;
  bool diverged = false;
  double gradient_norm = 0.0;
  int failed_starts = 0;
};

double empirical_risk(const LossSpec& spec, const MarginDesign& design, std::span<const double> beta,
                      std::span<double> grad);

// Start 0 is init itself; the rest are init + N(0, sd^2 I). The start with the
// lowest final risk wins, ties to the lower index.
FitResult fit_linear(const Dataset& data, const LossSpec& spec, const OptimizerConfig& cfg,
                     std::span<const double> init);
FitResult fit_linear(const MarginDesign& design, const LossSpec& spec, const OptimizerConfig& cfg,
                     std::span<const double> init);

double eval_sob(std::span<const double> beta_hat, const TrueParameter& beta);

// Binary decision of the linear model: y = +1 when beta^T x > 0, -1 otherwise
// (mirrored for LSLR with a > 1).
int predict_linear(std::span<const double> beta, std::span<const double> x, const LossSpec& spec);
double eval_ttr(std::span<const double> beta, const Dataset& test, const LossSpec& spec);
double eval_tsr(std::span<const double> beta, const Dataset& test, const LossSpec& spec);

}  // namespace smoothkl
