#include <immintrin.h>

#include <cstdint>

#include "kernels_impl.hpp"

#define SMOOTHKL_AVX2 __attribute__((target("avx2,fma")))

namespace smoothkl::detail {

namespace {

SMOOTHKL_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x <= 0; inputs below -708 are clamped.
SMOOTHKL_AVX2 inline __m256d exp_nonpos(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, c1, x);
  x = _mm256_fnmadd_pd(n, c2, x);
  const __m256d xx = _mm256_mul_pd(x, x);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, x);

  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));

  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(ni);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

// log(x) for positive normal x.
SMOOTHKL_AVX2 inline __m256d log_pos(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Biased exponent to double through the 2^52 trick.
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, magic)), _mm256_set1_pd(4503599627370496.0));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730950488), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, _mm256_set1_pd(2.0)));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(1.0 / 23.0);
  for (int k = 10; k >= 0; --k) poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / (2 * k + 1)));
  const __m256d series = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), poly);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  return _mm256_fmadd_pd(e, ln2_hi, _mm256_fmadd_pd(e, ln2_lo, series));
}

// log(1 + z) for z in [0, 1].
SMOOTHKL_AVX2 inline __m256d log1p_unit(__m256d z) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d u = _mm256_add_pd(one, z);
  const __m256d du = _mm256_sub_pd(u, one);
  const __m256d exact = _mm256_cmp_pd(du, _mm256_setzero_pd(), _CMP_EQ_OQ);
  const __m256d safe_du = _mm256_blendv_pd(du, one, exact);
  const __m256d corrected = _mm256_div_pd(_mm256_mul_pd(log_pos(u), z), safe_du);
  return _mm256_blendv_pd(corrected, z, exact);
}

struct Pieces {
  __m256d pos;  // sigma(v)
  __m256d neg;  // sigma(-v)
  __m256d sp_neg;  // -ln sigma(v)
  __m256d sp_pos;  // -ln sigma(-v)
};

SMOOTHKL_AVX2 inline Pieces logistic(__m256d v) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d abs_v = _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
  const __m256d e = exp_nonpos(_mm256_sub_pd(zero, abs_v));
  const __m256d inv = _mm256_div_pd(one, _mm256_add_pd(one, e));
  const __m256d small = _mm256_mul_pd(e, inv);
  const __m256d nonneg = _mm256_cmp_pd(v, zero, _CMP_GE_OQ);
  const __m256d l = log1p_unit(e);
  Pieces out;
  out.pos = _mm256_blendv_pd(small, inv, nonneg);
  out.neg = _mm256_blendv_pd(inv, small, nonneg);
  out.sp_neg = _mm256_add_pd(_mm256_max_pd(_mm256_sub_pd(zero, v), zero), l);
  out.sp_pos = _mm256_add_pd(_mm256_max_pd(v, zero), l);
  return out;
}

SMOOTHKL_AVX2 inline void loss_slope(const MarginParams& params, __m256d v, __m256d& loss, __m256d& slope) {
  const Pieces s = logistic(v);
  const double a = params.alpha;
  switch (params.family) {
    case MarginFamily::lr:
      loss = s.sp_neg;
      slope = _mm256_sub_pd(_mm256_setzero_pd(), s.neg);
      return;
    case MarginFamily::lslr: {
      const __m256d w = _mm256_set1_pd(1.0 - a / 2.0);
      const __m256d h = _mm256_set1_pd(a / 2.0);
      loss = _mm256_fmadd_pd(w, s.sp_neg, _mm256_mul_pd(h, s.sp_pos));
      slope = _mm256_fmsub_pd(h, s.pos, _mm256_mul_pd(w, s.neg));
      return;
    }
    case MarginFamily::mlslr: {
      const __m256d w = _mm256_set1_pd(1.0 - a / 2.0);
      const __m256d h = _mm256_set1_pd(a / 2.0);
      const __m256d r = _mm256_set1_pd(1.0 - a);
      const __m256d arg_pos = _mm256_fmadd_pd(r, s.pos, h);
      const __m256d arg_neg = _mm256_fmadd_pd(r, s.neg, h);
      const __m256d dsig = _mm256_mul_pd(s.pos, s.neg);
      loss = _mm256_sub_pd(_mm256_setzero_pd(),
                           _mm256_fmadd_pd(w, log_pos(arg_pos), _mm256_mul_pd(h, log_pos(arg_neg))));
      const __m256d bracket = _mm256_sub_pd(_mm256_div_pd(h, arg_neg), _mm256_div_pd(w, arg_pos));
      slope = _mm256_mul_pd(_mm256_mul_pd(r, dsig), bracket);
      return;
    }
    case MarginFamily::lsqlr: {
      const __m256d neg2 = _mm256_mul_pd(s.neg, s.neg);
      loss = _mm256_mul_pd(_mm256_set1_pd(0.5), neg2);
      slope = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(s.pos, neg2));
      return;
    }
  }
}

}  // namespace

SMOOTHKL_AVX2 double margin_risk_grad_avx2(const MarginParams& params, const double* columns, const double* signs,
                                           const double* beta, std::size_t n, std::size_t d, double* grad,
                                           double* scratch) {
  const std::size_t full = n - n % 4;

  // Margins.
  for (std::size_t i = 0; i < full; i += 4) _mm256_storeu_pd(scratch + i, _mm256_setzero_pd());
  for (std::size_t i = full; i < n; ++i) scratch[i] = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double* col = columns + j * n;
    const __m256d b = _mm256_set1_pd(beta[j]);
    for (std::size_t i = 0; i < full; i += 4) {
      _mm256_storeu_pd(scratch + i, _mm256_fmadd_pd(b, _mm256_loadu_pd(col + i), _mm256_loadu_pd(scratch + i)));
    }
    for (std::size_t i = full; i < n; ++i) scratch[i] += beta[j] * col[i];
  }

  // Losses, and slopes times signs in place of the margins.
  __m256d risk_acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < full; i += 4) {
    const __m256d sg = _mm256_loadu_pd(signs + i);
    const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(scratch + i), sg);
    __m256d loss = _mm256_setzero_pd(), slope = _mm256_setzero_pd();
    loss_slope(params, v, loss, slope);
    risk_acc = _mm256_add_pd(risk_acc, loss);
    _mm256_storeu_pd(scratch + i, _mm256_mul_pd(slope, sg));
  }
  double risk = hsum(risk_acc);
  if (full < n) {
    alignas(32) double tail_v[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double tail_loss[4];
    alignas(32) double tail_slope[4];
    for (std::size_t i = full; i < n; ++i) tail_v[i - full] = scratch[i] * signs[i];
    __m256d loss = _mm256_setzero_pd(), slope = _mm256_setzero_pd();
    loss_slope(params, _mm256_load_pd(tail_v), loss, slope);
    _mm256_store_pd(tail_loss, loss);
    _mm256_store_pd(tail_slope, slope);
    for (std::size_t i = full; i < n; ++i) {
      risk += tail_loss[i - full];
      scratch[i] = tail_slope[i - full] * signs[i];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    const double* col = columns + j * n;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < full; i += 4) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(scratch + i), _mm256_loadu_pd(col + i), acc);
    }
    double g = hsum(acc);
    for (std::size_t i = full; i < n; ++i) g += scratch[i] * col[i];
    grad[j] = g * inv_n;
  }
  return risk * inv_n;
}

SMOOTHKL_AVX2 void matmul_abt_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
                                   std::size_t k) {
  const std::size_t full = k - k % 4;
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
      for (std::size_t t = 0; t < full; t += 4) {
        const __m256d x = _mm256_loadu_pd(ai + t);
        s0 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b0 + t), s0);
        s1 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b1 + t), s1);
        s2 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b2 + t), s2);
        s3 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b3 + t), s3);
      }
      double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
      for (std::size_t t = full; t < k; ++t) {
        r0 += ai[t] * b0[t];
        r1 += ai[t] * b1[t];
        r2 += ai[t] * b2[t];
        r3 += ai[t] * b3[t];
      }
      c[i * n + j] = r0;
      c[i * n + j + 1] = r1;
      c[i * n + j + 2] = r2;
      c[i * n + j + 3] = r3;
    }
    for (; j < n; ++j) {
      const double* bj = b + j * k;
      __m256d s = _mm256_setzero_pd();
      for (std::size_t t = 0; t < full; t += 4) s = _mm256_fmadd_pd(_mm256_loadu_pd(ai + t), _mm256_loadu_pd(bj + t), s);
      double r = hsum(s);
      for (std::size_t t = full; t < k; ++t) r += ai[t] * bj[t];
      c[i * n + j] = r;
    }
  }
}

}  // namespace smoothkl::detail
