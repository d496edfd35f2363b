#include "smoothkl/estimation.hpp"

#include <cmath>
#include <stdexcept>

#include "smoothkl/errors.hpp"
#include "smoothkl/kernels.hpp"
#include "smoothkl/random.hpp"

namespace smoothkl {

void OptimizerConfig::validate() const {
  if (!(learning_rate_init > 0.0)) throw ConfigError("learning_rate_init must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw ConfigError("decay_factor must lie in (0, 1]");
  if (decay_every_epochs < 1) throw ConfigError("decay_every_epochs must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (multistart < 0) throw ConfigError("multistart must be nonnegative");
  if (!(multistart_scatter_sd >= 0.0)) throw ConfigError("multistart_scatter_sd must be nonnegative");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam beta2 must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
  if (!(divergence_cap > 0.0)) throw ConfigError("divergence_cap must be positive");
}

int OptimizerConfig::starts_for(const LossSpec& spec) const {
  if (multistart > 0) return multistart;
  return spec.family() == Family::mlslr || spec.family() == Family::lsqlr ? 30 : 1;
}

double OptimizerConfig::learning_rate(int epoch) const {
  return learning_rate_init * std::pow(decay_factor, epoch / decay_every_epochs);
}

double empirical_risk(const LossSpec& spec, const MarginDesign& design, std::span<const double> beta,
                      std::span<double> grad) {
  return margin_risk_grad(spec, design, beta, grad);
}

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct StartOutcome {
  std::vector<double> beta;
  double risk = 0.0;
  bool ok = false;
};

StartOutcome run_start(const MarginDesign& design, const LossSpec& spec, const OptimizerConfig& cfg,
                       std::vector<double> beta) {
  const std::size_t d = beta.size();
  std::vector<double> m(d, 0.0), v(d, 0.0), grad(d);
  double b1t = 1.0, b2t = 1.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double risk = margin_risk_grad(spec, design, beta, grad);
    if (!std::isfinite(risk)) return {std::move(beta), risk, false};
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    const double lr = cfg.learning_rate(epoch);
    for (std::size_t j = 0; j < d; ++j) {
      m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * grad[j];
      v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * grad[j] * grad[j];
      const double mhat = m[j] / (1.0 - b1t);
      const double vhat = v[j] / (1.0 - b2t);
      beta[j] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
    }
  }
  const double risk = margin_risk_grad(spec, design, beta, grad);
  const bool ok = std::isfinite(risk);
  return {std::move(beta), risk, ok};
}

}  // namespace

FitResult fit_linear(const MarginDesign& design, const LossSpec& spec, const OptimizerConfig& cfg,
                     std::span<const double> init) {
  cfg.validate();
  if (init.size() != design.d) throw std::invalid_argument("initial point has wrong dimension");
  for (double x : init) {
    if (!std::isfinite(x)) throw std::invalid_argument("initial point must be finite");
  }

  const int starts = cfg.starts_for(spec);
  RandomStream rng(cfg.seed, cfg.trial, StreamRole::multistart);
  FitResult best;
  bool have_best = false;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> start(init.begin(), init.end());
    if (s > 0) {
      for (double& x : start) x += cfg.multistart_scatter_sd * rng.normal();
    }
    StartOutcome out = run_start(design, spec, cfg, std::move(start));
    if (!out.ok) {
      ++best.failed_starts;
      continue;
    }
    if (!have_best || out.risk < best.final_empirical_risk) {
      best.beta_hat = std::move(out.beta);
      best.final_empirical_risk = out.risk;
      best.start_index_chosen = s;
      have_best = true;
    }
  }
  if (!have_best) throw NumericalError("every start produced a non-finite empirical risk");

  std::vector<double> grad(design.d);
  margin_risk_grad(spec, design, best.beta_hat, grad);
  best.gradient_norm = norm(grad);
  best.converged_epochs = cfg.epochs;
  best.diverged = norm(best.beta_hat) > cfg.divergence_cap;
  return best;
}

FitResult fit_linear(const Dataset& data, const LossSpec& spec, const OptimizerConfig& cfg,
                     std::span<const double> init) {
  return fit_linear(margin_design(data), spec, cfg, init);
}

double eval_sob(std::span<const double> beta_hat, const TrueParameter& beta) {
  if (beta_hat.size() != beta.dim()) throw std::invalid_argument("parameter dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < beta_hat.size(); ++j) {
    const double diff = beta_hat[j] - beta[j];
    s += diff * diff;
  }
  return std::sqrt(s);
}

int predict_linear(std::span<const double> beta, std::span<const double> x, const LossSpec& spec) {
  if (beta.size() != x.size()) throw std::invalid_argument("parameter dimension mismatch");
  double g = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) g += beta[j] * x[j];
  const bool positive = spec.labels_by_argmin() ? g < 0.0 : g > 0.0;
  return positive ? 0 : 1;
}

double eval_ttr(std::span<const double> beta, const Dataset& test, const LossSpec& spec) {
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    errors += predict_linear(beta, test.row(i), spec) != test.label(i);
  }
  return static_cast<double>(errors) / static_cast<double>(test.size());
}

double eval_tsr(std::span<const double> beta, const Dataset& test, const LossSpec& spec) {
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  const MarginDesign design = margin_design(test);
  std::vector<double> grad(design.d);
  return margin_risk_grad(spec, design, beta, grad);
}

}  // namespace smoothkl
