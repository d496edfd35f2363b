#pragma once

// Surrogate losses of logistic regression and its label-smoothed variants, in
// margin form for K = 2 and logit-vector form for general K, plus the family of
// rho-transformations that turn the logistic loss into a bounded one.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothkl/smoothing.hpp"

namespace smoothkl {

enum class Family { lr, lslr, mlslr, lsqlr };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// Which surrogate an estimator minimizes. LR is the a = 0 member of the LSLR and
// MLSLR families; LSQLR is its own closed form rather than MLSLR near a = 1.
class LossSpec {
 public:
  static LossSpec lr() { return LossSpec(Family::lr, std::nullopt); }
  static LossSpec lslr(const SmoothingLevel& level) { return LossSpec(Family::lslr, level); }
  static LossSpec mlslr(const SmoothingLevel& level) { return LossSpec(Family::mlslr, level); }
  static LossSpec lsqlr() { return LossSpec(Family::lsqlr, std::nullopt); }
  static LossSpec make(Family family, double alpha, int k);

  Family family() const { return family_; }
  // 0 for LR and LSQLR.
  double alpha() const { return level_ ? level_->alpha() : 0.0; }
  const std::optional<SmoothingLevel>& level() const { return level_; }

  // LSLR with a > 1 predicts through the smallest logit.
  bool labels_by_argmin() const { return family_ == Family::lslr && level_ && level_->beyond_one(); }

  std::string name() const;

 private:
  LossSpec(Family family, std::optional<SmoothingLevel> level) : family_(family), level_(level) {}
  Family family_;
  std::optional<SmoothingLevel> level_;
};

struct LossAndSlope {
  double loss;
  double slope;
};

// Binary surrogate phi(v) evaluated at the signed margin v = y g(x), y in {+1, -1}.
double binary_loss(const LossSpec& spec, double v);
double binary_loss_grad(const LossSpec& spec, double v);
LossAndSlope binary_loss_with_grad(const LossSpec& spec, double v);

// Multiclass surrogate over logits v with 0-based class label y.
double multiclass_loss(const LossSpec& spec, std::span<const double> v, int y);
std::vector<double> multiclass_loss_grad(const LossSpec& spec, std::span<const double> v, int y);
// Writes the gradient into grad (size K) and returns the loss.
double multiclass_loss_with_grad(const LossSpec& spec, std::span<const double> v, int y,
                                 std::span<double> grad);

std::vector<double> one_hot(int y, int k);

class RhoSpec {
 public:
  enum class Kind { pregibon, bianco_yohai, croux_haesbroeck, mls, lsq };

  static RhoSpec pregibon(double c) { return RhoSpec(Kind::pregibon, c); }
  static RhoSpec bianco_yohai(double c) { return RhoSpec(Kind::bianco_yohai, c); }
  static RhoSpec croux_haesbroeck(double c) { return RhoSpec(Kind::croux_haesbroeck, c); }
  static RhoSpec mls(double alpha);
  static RhoSpec lsq() { return RhoSpec(Kind::lsq, 0.0); }

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool bounded() const;
  std::string name() const;

 private:
  RhoSpec(Kind kind, double param);
  Kind kind_;
  double param_;
};

double rho(const RhoSpec& spec, double u);
// lim_{u -> inf} rho(u); throws for unbounded transformations.
double rho_limit(const RhoSpec& spec);
// (rho(u) - rho(0)) / (rho(inf) - rho(0)).
double rho_rescaled(const RhoSpec& spec, double u);

}  // namespace smoothkl
