#pragma once

// Minimal fixed-width float vectors for the kernels. Width 8 maps onto AVX2
// + FMA when the translation unit is compiled for it, otherwise onto a plain
// array the compiler may vectorize on its own. Width 1 is a scalar float.

#include <cstddef>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define CLIFFKERN_HAVE_AVX2 1
#else
#define CLIFFKERN_HAVE_AVX2 0
#endif

namespace cliffkern::simd {

inline constexpr bool kHaveAvx2 = CLIFFKERN_HAVE_AVX2;

template <int W>
struct Vec;

template <>
struct Vec<1> {
  float v;

  static Vec load(const float* p) { return {*p}; }
  static Vec broadcast(float x) { return {x}; }
  static Vec zero() { return {0.0f}; }
  void store(float* p) const { *p = v; }
};

inline Vec<1> fmadd(Vec<1> a, Vec<1> b, Vec<1> c) { return {a.v * b.v + c.v}; }
inline Vec<1> fnmadd(Vec<1> a, Vec<1> b, Vec<1> c) { return {c.v - a.v * b.v}; }
inline Vec<1> add(Vec<1> a, Vec<1> b) { return {a.v + b.v}; }
inline Vec<1> mul(Vec<1> a, Vec<1> b) { return {a.v * b.v}; }

#if CLIFFKERN_HAVE_AVX2

template <>
struct Vec<8> {
  __m256 v;

  static Vec load(const float* p) { return {_mm256_loadu_ps(p)}; }
  static Vec broadcast(float x) { return {_mm256_set1_ps(x)}; }
  static Vec zero() { return {_mm256_setzero_ps()}; }
  void store(float* p) const { _mm256_storeu_ps(p, v); }
};

inline Vec<8> fmadd(Vec<8> a, Vec<8> b, Vec<8> c) { return {_mm256_fmadd_ps(a.v, b.v, c.v)}; }
inline Vec<8> fnmadd(Vec<8> a, Vec<8> b, Vec<8> c) { return {_mm256_fnmadd_ps(a.v, b.v, c.v)}; }
inline Vec<8> add(Vec<8> a, Vec<8> b) { return {_mm256_add_ps(a.v, b.v)}; }
inline Vec<8> mul(Vec<8> a, Vec<8> b) { return {_mm256_mul_ps(a.v, b.v)}; }

#else

template <>
struct Vec<8> {
  float v[8];

  static Vec load(const float* p) {
    Vec r;
    for (int i = 0; i < 8; ++i) r.v[i] = p[i];
    return r;
  }
  static Vec broadcast(float x) {
    Vec r;
    for (int i = 0; i < 8; ++i) r.v[i] = x;
    return r;
  }
  static Vec zero() { return broadcast(0.0f); }
  void store(float* p) const {
    for (int i = 0; i < 8; ++i) p[i] = v[i];
  }
};

inline Vec<8> fmadd(Vec<8> a, Vec<8> b, Vec<8> c) {
  for (int i = 0; i < 8; ++i) c.v[i] += a.v[i] * b.v[i];
  return c;
}
inline Vec<8> fnmadd(Vec<8> a, Vec<8> b, Vec<8> c) {
  for (int i = 0; i < 8; ++i) c.v[i] -= a.v[i] * b.v[i];
  return c;
}
inline Vec<8> add(Vec<8> a, Vec<8> b) {
  for (int i = 0; i < 8; ++i) a.v[i] += b.v[i];
  return a;
}
inline Vec<8> mul(Vec<8> a, Vec<8> b) {
  for (int i = 0; i < 8; ++i) a.v[i] *= b.v[i];
  return a;
}

#endif

}  // namespace cliffkern::simd
