#pragma once

// k-D Clifford convolution, k in {1, 2, 3}: valid cross-correlation with
// multivector elements, out[b, co, p] = bias[co] + sum_{ci, q} f[ci, co, q] * x[b, ci, p + q]
// (filter on the left of the geometric product).
//
// Three implementations share one ConvLayer:
//   conv_reference    direct loop nest over multivectors, double accumulation
//   conv_kernelized   expanded real kernel (C_out*N_B, C_in*N_B, d_filter^k)
//   conv_packed       packed layouts + signature-specialized FMA schedule

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cliffkern/algebra.hpp"
#include "cliffkern/layout.hpp"
#include "cliffkern/specialize.hpp"

namespace cliffkern {

/// Vector width W (floats per SIMD register) and unroll factor U of the
/// packed kernel; the package length is L = W * U.
struct KernelParams {
  std::size_t W = 1;
  std::size_t U = 1;

  std::size_t L() const noexcept { return W * U; }

  /// W from the build's SIMD capability (8 with 256-bit vectors, else 1),
  /// overridable with CLIFFKERN_VECTOR_WIDTH; U = 1.
  static KernelParams defaults();
};

/// Natural vector width of this build, ignoring the environment override.
std::size_t native_vector_width() noexcept;

enum class KernelPath {
  Specialized,  // compile-time unrolled schedule for this (signature, W, U)
  Interpreted,  // runtime schedule, any W and U
};

class ConvLayer {
 public:
  ConvLayer(Dims dims, Signature sig, ConvFilters filters, ConvBias bias,
            KernelParams params = KernelParams::defaults());

  /// Same layer but executing `schedule` through the interpreted kernel.
  /// Intended for fault-injection tests of the verification machinery.
  ConvLayer with_schedule(OpSchedule schedule) const;

  const Dims& dims() const noexcept { return dims_; }
  const Signature& signature() const noexcept { return sig_; }
  const BladeProductTable& table() const noexcept { return table_; }
  const OpSchedule& schedule() const noexcept { return schedule_; }
  const ConvFilters& filters() const noexcept { return filters_; }
  const ConvBias& bias() const noexcept { return bias_; }
  const PackedFilters& packed_filters() const noexcept { return packed_filters_; }
  const KernelParams& params() const noexcept { return params_; }
  KernelPath kernel_path() const noexcept { return path_; }

  /// Offset within the input image of each output position / filter tap.
  const std::vector<std::size_t>& out_offsets() const noexcept { return out_offsets_; }
  const std::vector<std::size_t>& filter_offsets() const noexcept { return filter_offsets_; }

  using PackedKernelFn = void (*)(const ConvLayer&, const float* in, float* out);
  PackedKernelFn packed_kernel() const noexcept { return kernel_; }

 private:
  Dims dims_;
  Signature sig_;
  BladeProductTable table_;
  OpSchedule schedule_;
  ConvFilters filters_;
  ConvBias bias_;
  PackedFilters packed_filters_;
  KernelParams params_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> filter_offsets_;
  KernelPath path_;
  PackedKernelFn kernel_;
};

ConvOutput conv_reference(const ConvInput& x, const ConvLayer& layer);

ExpandedKernel build_expanded_kernel(const ConvLayer& layer);
ConvOutput conv_kernelized(const ConvInput& x, const ConvLayer& layer);

PackedOutput conv_packed(const PackedInput& xp, const ConvLayer& layer);

/// Raw-buffer forms over protocol layouts; spans must have exactly the
/// protocol sizes. conv_packed_forward packs, runs the packed kernel and unpacks.
void conv_reference_forward(std::span<const float> x, std::span<float> out, const ConvLayer& layer);
void conv_kernelized_forward(std::span<const float> x, std::span<float> out, const ConvLayer& layer);
void conv_packed_forward(std::span<const float> x, std::span<float> out, const ConvLayer& layer);

/// Products plus bias adds: B * C_out * d_out^k * (C_in * d_filter^k * flops(schedule) + N_B).
std::int64_t conv_flops(const Dims& dims, const OpSchedule& schedule);

}  // namespace cliffkern
