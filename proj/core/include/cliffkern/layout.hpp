#pragma once

// Protocol and packed tensor layouts for Clifford convolution.
//
// Spatial blocks d^k are linearized row-major, first coordinate slowest.
// Packed layouts group the batch into packages of L = W * U multivectors:
//
//   packed_input[c, p, b / L, blade, b % L] == input[b, c, p, blade]
//   packed_filters[c_in, c_out, q, blade]   == filters[blade, c_in, c_out, q]

#include <cstddef>
#include <vector>

#include "cliffkern/tensor.hpp"

namespace cliffkern {

struct Dims {
  std::size_t k = 1;
  std::size_t B = 1;
  std::size_t C_in = 1;
  std::size_t C_out = 1;
  std::size_t d_image = 1;
  std::size_t d_filter = 1;

  /// Throws ShapeMismatch unless 1 <= k, all counts >= 1 and d_filter <= d_image.
  static Dims make(std::size_t k, std::size_t B, std::size_t C_in, std::size_t C_out,
                   std::size_t d_image, std::size_t d_filter);

  std::size_t n_blades() const noexcept { return std::size_t{1} << k; }
  std::size_t d_out() const noexcept { return d_image - d_filter + 1; }
  std::size_t image_positions() const noexcept;
  std::size_t filter_positions() const noexcept;
  std::size_t out_positions() const noexcept;

  friend bool operator==(const Dims&, const Dims&) = default;
};

std::vector<std::size_t> conv_input_shape(const Dims& d);
std::vector<std::size_t> conv_output_shape(const Dims& d);
std::vector<std::size_t> conv_filters_shape(const Dims& d);
std::vector<std::size_t> conv_bias_shape(const Dims& d);
std::vector<std::size_t> packed_input_shape(const Dims& d, std::size_t L);
std::vector<std::size_t> packed_output_shape(const Dims& d, std::size_t L);
std::vector<std::size_t> packed_filters_shape(const Dims& d);

/// Linear offsets of each position of a side-`side`, k-dimensional block
/// embedded in a side-`stride_side` block (row-major, first coordinate slowest).
std::vector<std::size_t> spatial_offsets(std::size_t k, std::size_t side, std::size_t stride_side);

PackedInput pack_input(const ConvInput& x, const Dims& dims, std::size_t L);
ConvInput unpack_input(const PackedInput& xp, const Dims& dims, std::size_t L);
PackedFilters pack_filters(const ConvFilters& f, const Dims& dims);
ConvFilters unpack_filters(const PackedFilters& fp, const Dims& dims);
PackedOutput pack_output(const ConvOutput& y, const Dims& dims, std::size_t L);
ConvOutput unpack_output(const PackedOutput& yp, const Dims& dims, std::size_t L);

/// Appends zero multivectors so the batch becomes a multiple of L. Returns
/// the padded input; `padded_dims` receives the enlarged batch size.
ConvInput zero_pad_batch(const ConvInput& x, const Dims& dims, std::size_t L, Dims& padded_dims);

}  // namespace cliffkern
