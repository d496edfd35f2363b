#include <cstdlib>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "kernels_impl.hpp"
#include "smoothkl/kernels.hpp"

namespace smoothkl {

const char* to_string(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa pick_isa() {
  if (const char* env = std::getenv("SMOOTHKL_KERNEL")) {
    const std::string_view choice(env);
    if (choice == "scalar") return Isa::scalar;
    if (choice == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void check_shape(const MarginDesign& design, std::span<const double> beta, std::span<double> grad) {
  if (beta.size() != design.d || grad.size() != design.d) throw std::invalid_argument("parameter dimension mismatch");
  if (design.n == 0) throw std::invalid_argument("empty design");
}

detail::MarginParams margin_params(const LossSpec& spec) {
  double a = spec.alpha();
  switch (spec.family()) {
    case Family::lr: return {detail::MarginFamily::lr, 0.0};
    case Family::lslr: return {detail::MarginFamily::lslr, a};
    case Family::mlslr:
      if (a > 1.0) a = 2.0 - a;
      if (a == 0.0) return {detail::MarginFamily::lr, 0.0};
      return {detail::MarginFamily::mlslr, a};
    case Family::lsqlr: return {detail::MarginFamily::lsqlr, 0.0};
  }
  return {detail::MarginFamily::lr, 0.0};
}

}  // namespace

Isa active_isa() {
  static const Isa isa = pick_isa();
  return isa;
}

namespace detail {

void margins_scalar(const double* columns, const double* signs, const double* beta, std::size_t n,
                    std::size_t d, double* margins) {
  for (std::size_t i = 0; i < n; ++i) margins[i] = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double* col = columns + j * n;
    for (std::size_t i = 0; i < n; ++i) margins[i] += beta[j] * col[i];
  }
  for (std::size_t i = 0; i < n; ++i) margins[i] *= signs[i];
}

}  // namespace detail

double margin_risk_grad(const LossSpec& spec, const MarginDesign& design, std::span<const double> beta,
                        std::span<double> grad, Isa isa) {
  check_shape(design, beta, grad);
  if (spec.level() && spec.level()->k() != 2) throw std::invalid_argument("binary loss needs a K=2 smoothing level");
  const std::size_t n = design.n;
  const std::size_t d = design.d;
  std::vector<double> scratch(n);

  if (isa == Isa::avx2 && isa_supported(Isa::avx2)) {
    return detail::margin_risk_grad_avx2(margin_params(spec), design.columns.data(), design.signs.data(),
                                         beta.data(), n, d, grad.data(), scratch.data());
  }

  detail::margins_scalar(design.columns.data(), design.signs.data(), beta.data(), n, d, scratch.data());
  double risk = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const LossAndSlope ls = binary_loss_with_grad(spec, scratch[i]);
    risk += ls.loss;
    scratch[i] = ls.slope * design.signs[i];
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double* col = design.columns.data() + j * n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += scratch[i] * col[i];
    grad[j] = acc / static_cast<double>(n);
  }
  return risk / static_cast<double>(n);
}

double margin_risk_grad(const LossSpec& spec, const MarginDesign& design, std::span<const double> beta,
                        std::span<double> grad) {
  return margin_risk_grad(spec, design, beta, grad, active_isa());
}

void matmul_abt(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                Isa isa) {
  if (isa == Isa::avx2 && isa_supported(Isa::avx2)) {
    detail::matmul_abt_avx2(a, b, c, m, n, k);
  } else {
    detail::matmul_abt_scalar(a, b, c, m, n, k);
  }
}

void matmul_abt(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k) {
  matmul_abt(a, b, c, m, n, k, active_isa());
}

namespace detail {

void matmul_abt_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                       std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
      c[i * n + j] = acc;
    }
  }
}

}  // namespace detail

}  // namespace smoothkl
