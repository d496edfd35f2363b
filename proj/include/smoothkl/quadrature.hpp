#pragma once

#include <vector>

namespace smoothkl {

// Gauss-Hermite rule for the standard normal weight: sum_i w_i f(x_i) approximates
// E[f(Z)], Z ~ N(0, 1). Weights sum to one.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
GaussHermiteRule gauss_hermite_normal(int nodes);

}  // namespace smoothkl
