// AVX2+FMA backend for the SIG batch kernels. x^mu is computed as
// exp2(mu * log2(x)) with a bit-level exponent split and odd atanh series for
// log2, and a round-and-scale Taylor evaluation for exp2. Exact endpoints
// (mu = 0, mu = 1, x = 0) are restored with blends so the backends agree on
// the cases the optimizer relies on.
//
// This translation unit is compiled with -mavx2 -mfma; nothing here runs
// unless cpuid reported support at startup.
#include "pgo/sig_batch.hpp"

#ifdef PGO_HAVE_AVX2

#include <immintrin.h>

#include <cfloat>
#include <cmath>
#include <cstdint>

#include "pgo/robust_kernel.hpp"

namespace pgo::batch::avx2 {

namespace {

const __m256d kOne = _mm256_set1_pd(1.0);
const __m256d kHalf = _mm256_set1_pd(0.5);

// log2 of normal positive doubles. Exponent comes from the bit pattern; the
// mantissa m is folded into [sqrt(1/2), sqrt(2)) and evaluated via
// log2(m) = (2/ln2) * atanh((m-1)/(m+1)).
inline __m256d v_log2(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  // Biased exponent as double via the 2^52 magic-number trick.
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(
          _mm256_or_si256(biased, _mm256_castpd_si256(magic))),
      magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  // Mantissa in [1, 2).
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_castpd_si256(kOne);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // Fold into [sqrt(1/2), sqrt(2)) so the series argument stays small.
  const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
  const __m256d fold = _mm256_cmp_pd(m, sqrt2, _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, kHalf), fold);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, kOne), fold);

  const __m256d t =
      _mm256_div_pd(_mm256_sub_pd(m, kOne), _mm256_add_pd(m, kOne));
  const __m256d t2 = _mm256_mul_pd(t, t);
  // (2/ln2) * (1 + t^2/3 + t^4/5 + ... + t^22/23), Horner in t^2.
  const double two_over_ln2 = 2.8853900817779268;
  __m256d p = _mm256_set1_pd(two_over_ln2 / 23.0);
  const double denoms[] = {21.0, 19.0, 17.0, 15.0, 13.0, 11.0,
                           9.0,  7.0,  5.0,  3.0,  1.0};
  for (double d : denoms)
    p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(two_over_ln2 / d));
  return _mm256_fmadd_pd(t, p, e);
}

// 2^y for y in roughly [-1080, 1080]; underflow clamps to the smallest
// normal scale rather than producing subnormals.
inline __m256d v_exp2(__m256d y) {
  y = _mm256_max_pd(y, _mm256_set1_pd(-1022.0));
  y = _mm256_min_pd(y, _mm256_set1_pd(1023.0));
  const __m256d k =
      _mm256_round_pd(y, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d f = _mm256_sub_pd(y, k);
  // exp(f * ln2), |f| <= 1/2, degree-13 Taylor.
  const __m256d z = _mm256_mul_pd(f, _mm256_set1_pd(0.6931471805599453));
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  const double factorials[] = {479001600.0, 39916800.0, 3628800.0, 362880.0,
                               40320.0,     5040.0,     720.0,     120.0,
                               24.0,        6.0,        2.0,       1.0,
                               1.0};
  for (double fac : factorials)
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / fac));
  // Scale by 2^k through the exponent field.
  const __m256d kb =
      _mm256_add_pd(k, _mm256_set1_pd(1023.0 + 4503599627370496.0));
  const __m256i ki = _mm256_and_si256(_mm256_castpd_si256(kb),
                                      _mm256_set1_epi64x(0x7FFLL));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(ki, 52));
  return _mm256_mul_pd(p, scale);
}

// x^mu with exact handling of mu = 0, mu = 1, x = 0 and subnormal x.
inline __m256d v_pow(__m256d x, __m256d mu) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_x0 = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  const __m256d is_mu0 = _mm256_cmp_pd(mu, zero, _CMP_EQ_OQ);
  const __m256d is_mu1 = _mm256_cmp_pd(mu, kOne, _CMP_EQ_OQ);
  // Rescale subnormals into the normal range: x * 2^64, exponent - 64.
  const __m256d tiny = _mm256_set1_pd(DBL_MIN);
  const __m256d is_sub = _mm256_andnot_pd(is_x0, _mm256_cmp_pd(x, tiny, _CMP_LT_OQ));
  const __m256d two64 = _mm256_set1_pd(18446744073709551616.0);
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, two64), is_sub);
  __m256d lg = v_log2(xs);
  lg = _mm256_blendv_pd(lg, _mm256_sub_pd(lg, _mm256_set1_pd(64.0)), is_sub);
  __m256d r = v_exp2(_mm256_mul_pd(mu, lg));
  r = _mm256_blendv_pd(r, zero, is_x0);
  r = _mm256_blendv_pd(r, x, is_mu1);
  r = _mm256_blendv_pd(r, kOne, is_mu0);
  return r;
}

}  // namespace

void pow_mu(const double* x, const double* mu, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, v_pow(_mm256_loadu_pd(x + i),
                                    _mm256_loadu_pd(mu + i)));
  }
  for (; i < n; ++i) out[i] = std::pow(x[i], mu[i]);
}

void weights(const double* x, const double* mu, double* out, std::size_t n,
             double c) {
  const __m256d c2 = _mm256_set1_pd(c * c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mv = _mm256_loadu_pd(mu + i);
    const __m256d p = v_pow(xv, mv);
    const __m256d den = _mm256_add_pd(c2, p);
    const __m256d num = _mm256_mul_pd(
        c2, _mm256_fmadd_pd(_mm256_sub_pd(kOne, mv), p, c2));
    _mm256_storeu_pd(out + i,
                     _mm256_div_pd(num, _mm256_mul_pd(den, den)));
  }
  for (; i < n; ++i) out[i] = pgo::detail::sig_weight_x(x[i], mu[i], c);
}

void costs(const double* x, const double* mu, double* out, std::size_t n,
           double c) {
  const __m256d c2 = _mm256_set1_pd(c * c);
  const __m256d half_c2 = _mm256_set1_pd(0.5 * c * c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mv = _mm256_loadu_pd(mu + i);
    const __m256d p = v_pow(xv, mv);
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_mul_pd(half_c2, xv),
                                            _mm256_add_pd(c2, p)));
  }
  for (; i < n; ++i) out[i] = pgo::detail::sig_rho_x(x[i], mu[i], c);
}

}  // namespace pgo::batch::avx2

#endif  // PGO_HAVE_AVX2
