#pragma once

#include <cstddef>

namespace smoothkl::detail {

// Loss selector for the vector kernels. mls_alpha is already folded into [0, 1).
enum class MarginFamily { lr, lslr, mlslr, lsqlr };

struct MarginParams {
  MarginFamily family;
  double alpha;
};

// margins[i] = s_i x_i^T beta for the column-major design.
void margins_scalar(const double* columns, const double* signs, const double* beta, std::size_t n,
                    std::size_t d, double* margins);

double margin_risk_grad_avx2(const MarginParams& params, const double* columns, const double* signs,
                             const double* beta, std::size_t n, std::size_t d, double* grad, double* scratch);

void matmul_abt_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                       std::size_t k);
void matmul_abt_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                     std::size_t k);

}  // namespace smoothkl::detail
