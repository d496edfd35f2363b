#include "smoothkl/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "smoothkl/errors.hpp"

namespace smoothkl {

GaussHermiteRule gauss_hermite_normal(int nodes) {
  if (nodes < 1) throw std::invalid_argument("quadrature needs at least one node");
  // Jacobi matrix of He_k: zero diagonal, sqrt(k) off the diagonal.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nodes);
  Eigen::VectorXd sub(std::max(nodes - 1, 0));
  for (int k = 1; k < nodes; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("Gauss-Hermite eigen-decomposition failed");

  GaussHermiteRule rule;
  rule.nodes.resize(nodes);
  rule.weights.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  // Symmetrize: the rule is exact for odd moments only if nodes pair up.
  for (int i = 0; i < nodes / 2; ++i) {
    const int j = nodes - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (nodes % 2 == 1) rule.nodes[nodes / 2] = 0.0;
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace smoothkl
