#include "smoothkl/asymptotics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "smoothkl/errors.hpp"
#include "smoothkl/quadrature.hpp"

namespace smoothkl {

CovariateMeasure::CovariateMeasure(std::vector<CovariateComponent> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("covariate measure needs at least one coordinate");
  for (const auto& c : coords_) {
    if (const auto* pm = std::get_if<PointMass>(&c); pm && !std::isfinite(pm->value)) {
      throw std::invalid_argument("point mass location must be finite");
    }
  }
}

CovariateMeasure CovariateMeasure::intercept_and_normal() {
  return CovariateMeasure({PointMass{1.0}, StandardNormal{}});
}

std::size_t CovariateMeasure::normal_count() const {
  std::size_t n = 0;
  for (const auto& c : coords_) n += std::holds_alternative<StandardNormal>(c);
  return n;
}

TrueParameter::TrueParameter(std::vector<double> beta) : beta_(std::move(beta)) {
  if (beta_.empty()) throw std::invalid_argument("parameter vector is empty");
  for (double b : beta_) {
    if (!std::isfinite(b)) throw std::invalid_argument("parameter must be finite");
  }
}

namespace {

struct Weights {
  double a;
  double b;
};

// Integrand factors multiplying x x^T, as functions of p = P(Y = +1 | x) and q = 1 - p.
Weights integrand(Family family, double alpha, double p, double q) {
  if (p == 0.0 || q == 0.0) return {0.0, 0.0};
  switch (family) {
    case Family::lr:
      return {p * q, p * q};
    case Family::mlslr: {
      const double shift = alpha * (p - 0.5);
      const double d1 = p - shift;
      const double d2 = q + shift;
      const double pq2 = p * p * q * q;
      return {pq2 * p * q / (d1 * d1 * d2 * d2), pq2 / (d1 * d2)};
    }
    case Family::lsqlr: {
      const double pq2 = p * p * q * q;
      return {pq2 * p * q, pq2};
    }
    case Family::lslr:
      break;
  }
  throw std::invalid_argument("unsupported family");
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

ScoreMatrices ab_matrices(const LossSpec& spec, const TrueParameter& beta, const CovariateMeasure& measure,
                          const QuadratureSpec& quad) {
  if (spec.family() == Family::lslr) {
    throw std::invalid_argument("asymptotic covariance is not defined for LSLR: its estimator is not consistent for beta");
  }
  if (spec.level() && spec.level()->k() != 2) throw std::invalid_argument("asymptotics are binary (K = 2)");
  if (beta.dim() != measure.dim()) throw std::invalid_argument("parameter and covariate dimensions differ");
  if (quad.nodes < 10) throw std::invalid_argument("quadrature needs at least 10 nodes");
  const std::size_t normals = measure.normal_count();
  if (normals > 3) throw std::invalid_argument("tensor quadrature limited to 3 normal coordinates");

  double alpha = spec.alpha();
  if (alpha > 1.0) alpha = 2.0 - alpha;

  const std::size_t d = measure.dim();
  const GaussHermiteRule rule = gauss_hermite_normal(quad.nodes);
  const std::size_t m = rule.nodes.size();
  std::size_t points = 1;
  for (std::size_t i = 0; i < normals; ++i) points *= m;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd x(d);
  for (std::size_t idx = 0; idx < points; ++idx) {
    std::size_t rest = idx;
    double weight = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (const auto* pm = std::get_if<PointMass>(&measure.coords()[j])) {
        x(j) = pm->value;
      } else {
        const std::size_t node = rest % m;
        rest /= m;
        x(j) = rule.nodes[node];
        weight *= rule.weights[node];
      }
    }
    double eta = 0.0;
    for (std::size_t j = 0; j < d; ++j) eta += beta[j] * x(j);
    const Weights w = integrand(spec.family(), alpha, sigmoid(eta), sigmoid(-eta));
    const Eigen::MatrixXd outer = x * x.transpose();
    a.noalias() += (weight * w.a) * outer;
    b.noalias() += (weight * w.b) * outer;
  }
  return {a, b};
}

Sandwich sandwich(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("sandwich needs square matrices of equal size");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("B is not positive definite; the covariate measure or parameter is degenerate");
  }
  const Eigen::MatrixXd binv_a = llt.solve(a);
  Eigen::MatrixXd c = llt.solve(binv_a.transpose());
  c = 0.5 * (c + c.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  Sandwich out;
  out.c = c;
  out.amse = c.trace();
  out.b_condition = ev.maxCoeff() / ev.minCoeff();
  return out;
}

AsymptoticReport asymptotic_report(const LossSpec& spec, const TrueParameter& beta,
                                   const CovariateMeasure& measure, const QuadratureSpec& quad) {
  const ScoreMatrices mats = ab_matrices(spec, beta, measure, quad);
  const Sandwich s = sandwich(mats.a, mats.b);
  double lr_amse = s.amse;
  if (spec.family() != Family::lr && !(spec.family() == Family::mlslr && spec.alpha() == 0.0)) {
    const ScoreMatrices lr = ab_matrices(LossSpec::lr(), beta, measure, quad);
    lr_amse = sandwich(lr.a, lr.b).amse;
  }
  AsymptoticReport report;
  report.a = mats.a;
  report.b = mats.b;
  report.c = s.c;
  report.amse = s.amse;
  report.are_vs_lr = lr_amse / s.amse;
  report.b_condition = s.b_condition;
  return report;
}

double are(const LossSpec& spec, const TrueParameter& beta, const CovariateMeasure& measure,
           const QuadratureSpec& quad) {
  return asymptotic_report(spec, beta, measure, quad).are_vs_lr;
}

}  // namespace smoothkl
