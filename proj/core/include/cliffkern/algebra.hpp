#pragma once

// Real Clifford algebra Cl_g(R^k): signatures, basis blades, the blade
// product table and the geometric product.
//
// Blades are stored in ascending bitmask order: bit (i-1) set means generator
// e_i is part of the blade, so for k = 3 the order is
// 1, e1, e2, e12, e3, e13, e23, e123.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cliffkern {

struct BladeIndex {
  std::uint32_t mask = 0;

  friend constexpr bool operator==(BladeIndex, BladeIndex) = default;
  friend constexpr auto operator<=>(BladeIndex, BladeIndex) = default;
};

/// Name such as "1", "e2" or "e13" (generators numbered from 1).
std::string blade_name(BladeIndex blade);

/// Coefficient c with e_a * e_b = c * e_(a xor b), where `g` holds the
/// generator squares. Shared by the runtime table and compile-time schedules.
constexpr int blade_product_coefficient(std::uint32_t a, std::uint32_t b,
                                        std::span<const std::int8_t> g) {
  int swaps = 0;
  for (std::uint32_t bits = b; bits != 0; bits &= bits - 1) {
    const int j = std::countr_zero(bits);
    const std::uint32_t above = ~((std::uint32_t{2} << j) - 1);
    swaps += std::popcount(a & above);
  }
  int coeff = (swaps % 2 == 0) ? 1 : -1;
  for (std::uint32_t common = a & b; common != 0; common &= common - 1) {
    coeff *= g[static_cast<std::size_t>(std::countr_zero(common))];
  }
  return coeff;
}

class Signature {
 public:
  /// Validating constructor; throws InvalidMetricValue / InvalidSignature.
  Signature(std::initializer_list<int> g);
  explicit Signature(std::span<const int> g);

  std::size_t k() const noexcept { return g_.size(); }
  std::size_t n_blades() const noexcept { return std::size_t{1} << g_.size(); }
  std::span<const std::int8_t> g() const noexcept { return g_; }
  int g(std::size_t i) const { return g_.at(i); }
  bool has_zero() const noexcept;

  /// "1,1,-1" style, the inverse of parse_signature.
  std::string to_string() const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<std::int8_t> g_;
};

/// Accepts arbitrary reals; every element must be exactly one of -1, 0, +1
/// and at least one must be non-zero.
Signature validate_signature(std::span<const double> g);

/// Parses a comma list such as "1,1,-1".
Signature parse_signature(const std::string& text);

/// Every valid signature of dimension k (3^k - 1 of them), in base-3 order.
std::vector<Signature> all_signatures(std::size_t k);

struct BladeProduct {
  BladeIndex target;
  int coeff = 0;

  friend bool operator==(const BladeProduct&, const BladeProduct&) = default;
};

BladeProduct blade_product(BladeIndex a, BladeIndex b, const Signature& sig);

class BladeProductTable {
 public:
  explicit BladeProductTable(const Signature& sig);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t n_blades() const noexcept { return n_; }
  const BladeProduct& at(BladeIndex a, BladeIndex b) const { return entries_[a.mask * n_ + b.mask]; }
  const BladeProduct& at(std::size_t a, std::size_t b) const { return entries_[a * n_ + b]; }

 private:
  Signature sig_;
  std::size_t n_;
  std::vector<BladeProduct> entries_;
};

inline BladeProductTable product_table(const Signature& sig) { return BladeProductTable(sig); }

class Multivector {
 public:
  explicit Multivector(std::size_t n_blades);
  explicit Multivector(std::vector<float> blades);
  Multivector(std::initializer_list<float> blades) : Multivector(std::vector<float>(blades)) {}

  static Multivector scalar(const Signature& sig, float value);
  static Multivector basis(const Signature& sig, BladeIndex blade, float value = 1.0f);

  std::size_t size() const noexcept { return blades_.size(); }
  float operator[](std::size_t i) const { return blades_[i]; }
  float& operator[](std::size_t i) { return blades_[i]; }
  std::span<const float> blades() const noexcept { return blades_; }
  std::span<float> blades() noexcept { return blades_; }

  Multivector operator-() const;

  friend bool operator==(const Multivector&, const Multivector&) = default;

 private:
  std::vector<float> blades_;
};

/// out[a ^ b] += coeff(a, b) * x[a] * y[b] over all blade pairs, accumulated
/// in double. The accumulator is not cleared.
void geometric_product_accumulate(std::span<const float> x, std::span<const float> y,
                                  const BladeProductTable& table, std::span<double> acc);

Multivector geometric_product(const Multivector& x, const Multivector& y,
                              const BladeProductTable& table);
Multivector multivector_add(const Multivector& x, const Multivector& y);

}  // namespace cliffkern
