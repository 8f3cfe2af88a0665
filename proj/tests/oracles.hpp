#pragma once

// Test-side oracles, written without the library's bitmask sign formula.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cliffkern/algebra.hpp"
#include "cliffkern/tensor.hpp"

namespace oracle {

/// Reduces the generator word of e_a e_b to normal form by adjacent swaps
/// (anticommuting distinct generators) and contractions e_i e_i = g_i.
inline std::pair<std::uint32_t, int> blade_product(std::uint32_t a, std::uint32_t b, const std::vector<int>& g) {
  std::vector<int> word;
  for (int i = 0; i < 32; ++i)
    if (a >> i & 1) word.push_back(i);
  for (int i = 0; i < 32; ++i)
    if (b >> i & 1) word.push_back(i);
  int coeff = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      if (word[i] == word[i + 1]) {
        coeff *= g[static_cast<std::size_t>(word[i])];
        word.erase(word.begin() + static_cast<std::ptrdiff_t>(i), word.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
      if (word[i] > word[i + 1]) {
        std::swap(word[i], word[i + 1]);
        coeff = -coeff;
        changed = true;
        break;
      }
    }
  }
  std::uint32_t mask = 0;
  for (int i : word) mask |= 1u << i;
  return {mask, coeff};
}

inline std::vector<int> g_of(const cliffkern::Signature& sig) {
  return std::vector<int>(sig.g().begin(), sig.g().end());
}

/// Geometric product in long double; x on the left.
inline std::vector<long double> product(std::span<const float> x, std::span<const float> y, const std::vector<int>& g) {
  const std::size_t n = x.size();
  std::vector<long double> out(n, 0.0L);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      const auto [t, c] = blade_product(a, b, g);
      out[t] += static_cast<long double>(c) * x[a] * y[b];
    }
  return out;
}

/// Direct k-D valid cross-correlation over the protocol layouts.
inline std::vector<float> conv(std::size_t k, std::size_t B, std::size_t C_in, std::size_t C_out, std::size_t d_image,
                               std::size_t d_filter, std::span<const float> x, std::span<const float> f,
                               std::span<const float> bias, const std::vector<int>& g) {
  const std::size_t NB = std::size_t{1} << k, d_out = d_image - d_filter + 1;
  std::size_t P = 1, Q = 1, O = 1;
  for (std::size_t i = 0; i < k; ++i) {
    P *= d_image;
    Q *= d_filter;
    O *= d_out;
  }
  // Coordinates in row-major order, first coordinate slowest.
  auto coords = [k](std::size_t lin, std::size_t side) {
    std::vector<std::size_t> c(k);
    for (std::size_t i = k; i-- > 0;) {
      c[i] = lin % side;
      lin /= side;
    }
    return c;
  };
  std::vector<float> out(B * C_out * O * NB);
  std::vector<float> fm(NB), xm(NB);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t co = 0; co < C_out; ++co)
      for (std::size_t o = 0; o < O; ++o) {
        std::vector<long double> acc(NB, 0.0L);
        const auto oc = coords(o, d_out);
        for (std::size_t ci = 0; ci < C_in; ++ci)
          for (std::size_t q = 0; q < Q; ++q) {
            const auto qc = coords(q, d_filter);
            std::size_t p = 0;
            for (std::size_t i = 0; i < k; ++i) p = p * d_image + oc[i] + qc[i];
            for (std::size_t t = 0; t < NB; ++t) {
              fm[t] = f[((t * C_in + ci) * C_out + co) * Q + q];
              xm[t] = x[((b * C_in + ci) * P + p) * NB + t];
            }
            const auto prod = product(fm, xm, g);
            for (std::size_t t = 0; t < NB; ++t) acc[t] += prod[t];
          }
        for (std::size_t t = 0; t < NB; ++t)
          out[((b * C_out + co) * O + o) * NB + t] = static_cast<float>(acc[t] + bias[t * C_out + co]);
      }
  return out;
}

/// Logistic function in long double.
inline long double sigmoid(long double s) { return 1.0L / (1.0L + std::exp(-s)); }

template <class T>
void randomize(T&& values, std::mt19937_64& rng, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  for (float& v : values) v = d(rng);
}

/// Normwise relative error max|a-e| / max|e|.
inline double rel_error(std::span<const float> a, std::span<const float> e) {
  double num = 0.0, den = 1e-30;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(static_cast<double>(a[i]) - e[i]));
    den = std::max(den, std::abs(static_cast<double>(e[i])));
  }
  return std::isnan(num) ? INFINITY : num / den;
}

inline double abs_error(std::span<const float> a, std::span<const float> e) {
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num = std::max(num, std::abs(static_cast<double>(a[i]) - e[i]));
  return std::isnan(num) ? INFINITY : num;
}

}  // namespace oracle
