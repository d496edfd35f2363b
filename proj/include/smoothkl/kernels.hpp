#pragma once

// Hot loops with a scalar reference and an AVX2/FMA variant picked at runtime.
// SMOOTHKL_KERNEL=scalar forces the reference path.

#include <cstddef>
#include <span>

#include "smoothkl/dataset.hpp"
#include "smoothkl/losses.hpp"

namespace smoothkl {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);
bool isa_supported(Isa isa);
// Best supported ISA, unless overridden by the environment.
Isa active_isa();

// Empirical risk (1/n) sum phi(s_i x_i^T beta) of a binary design; writes its
// gradient with respect to beta into grad (size d).
double margin_risk_grad(const LossSpec& spec, const MarginDesign& design, std::span<const double> beta,
                        std::span<double> grad, Isa isa);
double margin_risk_grad(const LossSpec& spec, const MarginDesign& design, std::span<const double> beta,
                        std::span<double> grad);

// C (m x n) = A (m x k) B^T, where B is n x k. All row-major.
void matmul_abt(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                Isa isa);
void matmul_abt(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k);

}  // namespace smoothkl
