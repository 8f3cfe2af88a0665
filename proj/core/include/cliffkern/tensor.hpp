#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cliffkern/aligned.hpp"
#include "cliffkern/error.hpp"

namespace cliffkern {

/// Which memory layout a tensor's shape refers to. Values are part of the
/// tensor file format and must stay stable.
enum class LayoutTag : std::uint32_t {
  Generic = 0,
  ConvInput = 1,       // (B, C_in, d_image^k, N_B)
  ConvOutput = 2,      // (B, C_out, d_out^k, N_B)
  ConvFilters = 3,     // (N_B, C_in, C_out, d_filter^k)
  ConvBias = 4,        // (N_B, C_out)
  PackedInput = 5,     // (C_in, d_image^k, B/L, N_B, L)
  PackedOutput = 6,    // (C_out, d_out^k, B/L, N_B, L)
  PackedFilters = 7,   // (C_in, C_out, d_filter^k, N_B)
  ExpandedKernel = 8,  // (C_out*N_B, C_in*N_B, d_filter^k)
  LinearInput = 9,     // (B, C_in, N_B)
  LinearOutput = 10,   // (B, C_out, N_B)
  LinearWeight = 11,   // (N_B, C_out, C_in)
  LinearBias = 12,     // (N_B, C_out)
  Activation = 13,     // (B, C, N_B)
  VPack = 14,          // (B, C, K)
};

std::string to_string(LayoutTag tag);

inline std::size_t shape_volume(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

std::string shape_to_string(std::span<const std::size_t> shape);

/// Contiguous row-major single-precision tensor whose layout is part of its
/// type, so a PackedInput cannot be passed where a ConvInput is expected.
template <LayoutTag Tag>
class Tensor {
 public:
  static constexpr LayoutTag layout = Tag;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(shape_volume(shape_), 0.0f) {}
  Tensor(std::vector<std::size_t> shape, std::span<const float> values) : shape_(std::move(shape)) {
    if (values.size() != shape_volume(shape_)) {
      throw Error(Errc::ShapeMismatch, to_string(Tag) + " expects " + std::to_string(shape_volume(shape_)) +
                                           " values for shape " + shape_to_string(shape_) + ", got " +
                                           std::to_string(values.size()));
    }
    data_.assign(values.begin(), values.end());
  }

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t bytes() const noexcept { return data_.size() * sizeof(float); }

  float* data() noexcept { return data_.data(); }
  const float* data() const noexcept { return data_.data(); }
  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }

  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  FloatBuffer data_;
};

using ConvInput = Tensor<LayoutTag::ConvInput>;
using ConvOutput = Tensor<LayoutTag::ConvOutput>;
using ConvFilters = Tensor<LayoutTag::ConvFilters>;
using ConvBias = Tensor<LayoutTag::ConvBias>;
using PackedInput = Tensor<LayoutTag::PackedInput>;
using PackedOutput = Tensor<LayoutTag::PackedOutput>;
using PackedFilters = Tensor<LayoutTag::PackedFilters>;
using ExpandedKernel = Tensor<LayoutTag::ExpandedKernel>;
using LinearInput = Tensor<LayoutTag::LinearInput>;
using LinearOutput = Tensor<LayoutTag::LinearOutput>;
using LinearWeight = Tensor<LayoutTag::LinearWeight>;
using LinearBias = Tensor<LayoutTag::LinearBias>;
using ActivationTensor = Tensor<LayoutTag::Activation>;
using VPack = Tensor<LayoutTag::VPack>;

template <LayoutTag Tag>
void require_shape(const Tensor<Tag>& t, const std::vector<std::size_t>& expected, const char* what) {
  if (t.shape() != expected) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": expected shape " + shape_to_string(expected) +
                                         ", got " + shape_to_string(t.shape()));
  }
}

}  // namespace cliffkern
