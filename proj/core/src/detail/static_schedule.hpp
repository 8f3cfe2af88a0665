#pragma once

// Compile-time schedules: the constexpr counterpart of build_schedule, used
// to instantiate one fully unrolled kernel per signature.

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>

#include "cliffkern/algebra.hpp"

namespace cliffkern::detail {

inline constexpr std::size_t kMaxStaticK = 3;

struct SigKey {
  int k = 0;
  std::array<std::int8_t, kMaxStaticK> g{};

  constexpr std::size_t n_blades() const { return std::size_t{1} << k; }
  friend constexpr bool operator==(const SigKey&, const SigKey&) = default;
};

struct StaticTerm {
  std::uint8_t out = 0;
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  bool negate = false;
};

constexpr int coefficient(const SigKey& s, std::uint32_t a, std::uint32_t b) {
  return blade_product_coefficient(a, b, std::span<const std::int8_t>(s.g.data(), static_cast<std::size_t>(s.k)));
}

constexpr std::size_t count_terms(const SigKey& s) {
  std::size_t n = 0;
  for (std::uint32_t a = 0; a < s.n_blades(); ++a)
    for (std::uint32_t b = 0; b < s.n_blades(); ++b)
      if (coefficient(s, a, b) != 0) ++n;
  return n;
}

// Same ordering as build_schedule: output blade, then filter blade.
template <SigKey S>
constexpr auto make_terms() {
  constexpr std::size_t N = count_terms(S);
  std::array<StaticTerm, N> terms{};
  std::size_t i = 0;
  for (std::uint32_t t = 0; t < S.n_blades(); ++t) {
    for (std::uint32_t a = 0; a < S.n_blades(); ++a) {
      const std::uint32_t b = t ^ a;
      const int c = coefficient(S, a, b);
      if (c == 0) continue;
      terms[i++] = StaticTerm{static_cast<std::uint8_t>(t), static_cast<std::uint8_t>(a),
                              static_cast<std::uint8_t>(b), c < 0};
    }
  }
  return terms;
}

template <SigKey S>
struct StaticSchedule {
  static constexpr std::size_t n_blades = S.n_blades();
  static constexpr auto terms = make_terms<S>();
  static constexpr std::size_t size = terms.size();
};

constexpr std::size_t count_keys() {
  std::size_t n = 0, p = 1;
  for (std::size_t k = 1; k <= kMaxStaticK; ++k) {
    p *= 3;
    n += p - 1;
  }
  return n;
}

inline constexpr std::size_t kNumStaticSignatures = count_keys();

// k = 1, 2, 3 in turn; within k, base-3 order matching all_signatures().
constexpr std::array<SigKey, kNumStaticSignatures> make_keys() {
  std::array<SigKey, kNumStaticSignatures> keys{};
  std::size_t idx = 0;
  std::size_t total = 1;
  for (int k = 1; k <= static_cast<int>(kMaxStaticK); ++k) {
    total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      SigKey key{};
      key.k = k;
      std::size_t c = code;
      bool any = false;
      for (int i = 0; i < k; ++i) {
        key.g[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(static_cast<int>(c % 3) - 1);
        any = any || key.g[static_cast<std::size_t>(i)] != 0;
        c /= 3;
      }
      if (any) keys[idx++] = key;
    }
  }
  return keys;
}

inline constexpr auto kStaticSignatures = make_keys();

inline SigKey to_key(const Signature& sig) {
  SigKey key{};
  key.k = static_cast<int>(sig.k());
  for (std::size_t i = 0; i < sig.k() && i < kMaxStaticK; ++i) key.g[i] = sig.g()[i];
  return key;
}

/// Position of `sig` in kStaticSignatures, or -1.
inline int static_signature_slot(const Signature& sig) {
  if (sig.k() == 0 || sig.k() > kMaxStaticK) return -1;
  const SigKey key = to_key(sig);
  for (std::size_t i = 0; i < kStaticSignatures.size(); ++i) {
    if (kStaticSignatures[i] == key) return static_cast<int>(i);
  }
  return -1;
}

/// Builds a table `Fn table[36]` with table[i] = Make::template get<kStaticSignatures[i]>().
template <class Make, std::size_t... I>
constexpr auto make_dispatch_table(std::index_sequence<I...>) {
  using Fn = decltype(Make::template get<kStaticSignatures[0]>());
  return std::array<Fn, sizeof...(I)>{Make::template get<kStaticSignatures[I]>()...};
}

template <class Make>
constexpr auto make_dispatch_table() {
  return make_dispatch_table<Make>(std::make_index_sequence<kNumStaticSignatures>{});
}

}  // namespace cliffkern::detail
