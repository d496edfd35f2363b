#pragma once

// Asymptotic covariance of linear-model estimates under the binary surrogates,
// C = B^{-1} A B^{-1}, integrated over a product covariate measure, and the
// asymptotic relative efficiency trace(C_LR) / trace(C).

#include <Eigen/Core>
#include <variant>
#include <vector>

#include "smoothkl/losses.hpp"

namespace smoothkl {

struct PointMass {
  double value;
};
struct StandardNormal {};

using CovariateComponent = std::variant<PointMass, StandardNormal>;

class CovariateMeasure {
 public:
  explicit CovariateMeasure(std::vector<CovariateComponent> coords);
  // x1 = 1 (intercept), x2 ~ N(0, 1).
  static CovariateMeasure intercept_and_normal();

  std::size_t dim() const { return coords_.size(); }
  const std::vector<CovariateComponent>& coords() const { return coords_; }
  std::size_t normal_count() const;

 private:
  std::vector<CovariateComponent> coords_;
};

class TrueParameter {
 public:
  explicit TrueParameter(std::vector<double> beta);
  std::size_t dim() const { return beta_.size(); }
  const std::vector<double>& values() const { return beta_; }
  double operator[](std::size_t i) const { return beta_[i]; }

 private:
  std::vector<double> beta_;
};

struct QuadratureSpec {
  int nodes = 200;
};

struct ScoreMatrices {
  Eigen::MatrixXd a;  // E[grad phi grad phi^T]
  Eigen::MatrixXd b;  // E[hessian phi]
};

struct Sandwich {
  Eigen::MatrixXd c;
  double amse = 0.0;
  double b_condition = 0.0;  // 2-norm condition number of B
};

struct AsymptoticReport {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  double amse = 0.0;
  double are_vs_lr = 0.0;
  double b_condition = 0.0;
};

inline constexpr double kIllConditioned = 1e12;

// Accepts LR, MLSLR with a in [0, 1) U (1, 2] (a and 2 - a coincide for K = 2) and
// LSQLR. LSLR is rejected: its R-logit estimator does not target beta.
ScoreMatrices ab_matrices(const LossSpec& spec, const TrueParameter& beta, const CovariateMeasure& measure,
                          const QuadratureSpec& quad = {});

// Solves through a Cholesky factorization of B; a B that is not positive definite
// raises NumericalError.
Sandwich sandwich(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

double are(const LossSpec& spec, const TrueParameter& beta, const CovariateMeasure& measure,
           const QuadratureSpec& quad = {});

AsymptoticReport asymptotic_report(const LossSpec& spec, const TrueParameter& beta,
                                   const CovariateMeasure& measure, const QuadratureSpec& quad = {});

}  // namespace smoothkl
