#pragma once

// AVX2 exp/sigmoid: Cody-Waite range reduction by ln 2 and a degree-5
// minimax polynomial (the classic cephes expf coefficients).

#include "detail/simd.hpp"

#if CLIFFKERN_HAVE_AVX2

namespace cliffkern::simd {

inline __m256 exp256_ps(__m256 x) {
  const __m256 hi = _mm256_set1_ps(88.3762626647949f);
  const __m256 lo = _mm256_set1_ps(-88.3762626647949f);
  const __m256 log2e = _mm256_set1_ps(1.44269504088896341f);
  const __m256 ln2_hi = _mm256_set1_ps(0.693359375f);
  const __m256 ln2_lo = _mm256_set1_ps(-2.12194440e-4f);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 half = _mm256_set1_ps(0.5f);

  x = _mm256_min_ps(_mm256_max_ps(x, lo), hi);
  __m256 n = _mm256_floor_ps(_mm256_fmadd_ps(x, log2e, half));
  x = _mm256_fnmadd_ps(n, ln2_hi, x);
  x = _mm256_fnmadd_ps(n, ln2_lo, x);

  __m256 y = _mm256_set1_ps(1.9875691500e-4f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
  y = _mm256_fmadd_ps(y, x, half);
  y = _mm256_fmadd_ps(y, _mm256_mul_ps(x, x), _mm256_add_ps(x, one));

  // 2^n through the exponent field; n is in [-127, 127] after clamping.
  const __m256i e = _mm256_slli_epi32(_mm256_add_epi32(_mm256_cvtps_epi32(n), _mm256_set1_epi32(127)), 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(e));
}

inline __m256 sigmoid256_ps(__m256 s) {
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 e = exp256_ps(_mm256_sub_ps(_mm256_setzero_ps(), s));
  return _mm256_div_ps(one, _mm256_add_ps(one, e));
}

}  // namespace cliffkern::simd

#endif
