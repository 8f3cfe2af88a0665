#pragma once

// Clifford linear layer: out[b, co] = bias[co] + sum_ci w[ci, co] * x[b, ci]
// with the weight multivector on the left of the geometric product.
//
// Layouts: input (B, C_in, N_B), output (B, C_out, N_B),
// weight (N_B, C_out, C_in), bias (N_B, C_out).

#include <cstddef>
#include <cstdint>
#include <span>

#include "cliffkern/algebra.hpp"
#include "cliffkern/specialize.hpp"
#include "cliffkern/tensor.hpp"

namespace cliffkern {

std::vector<std::size_t> linear_input_shape(std::size_t B, std::size_t C_in, std::size_t n_blades);
std::vector<std::size_t> linear_output_shape(std::size_t B, std::size_t C_out, std::size_t n_blades);
std::vector<std::size_t> linear_weight_shape(std::size_t C_in, std::size_t C_out, std::size_t n_blades);
std::vector<std::size_t> linear_bias_shape(std::size_t C_out, std::size_t n_blades);

class LinearLayer {
 public:
  LinearLayer(Signature sig, std::size_t C_in, std::size_t C_out, LinearWeight weight, LinearBias bias);

  /// Same layer driven by an arbitrary schedule (fault injection).
  LinearLayer with_schedule(OpSchedule schedule) const;

  const Signature& signature() const noexcept { return sig_; }
  std::size_t n_blades() const noexcept { return sig_.n_blades(); }
  std::size_t C_in() const noexcept { return C_in_; }
  std::size_t C_out() const noexcept { return C_out_; }
  const BladeProductTable& table() const noexcept { return table_; }
  const OpSchedule& schedule() const noexcept { return schedule_; }
  const LinearWeight& weight() const noexcept { return weight_; }
  const LinearBias& bias() const noexcept { return bias_; }

 private:
  Signature sig_;
  std::size_t C_in_, C_out_;
  BladeProductTable table_;
  OpSchedule schedule_;
  LinearWeight weight_;
  LinearBias bias_;
};

LinearOutput linear_reference(const LinearInput& x, const LinearLayer& layer);

/// Baseline: materializes the (C_out*N_B, C_in*N_B) real kernel, then a
/// plain real matrix-vector product per batch row.
LinearOutput linear_kernelized(const LinearInput& x, const LinearLayer& layer);

/// Kernel-free: walks the schedule and reads weight and input blades from
/// their original positions.
LinearOutput linear_traced(const LinearInput& x, const LinearLayer& layer);

/// One (B x C_in) * (C_in x C_out) product per schedule term on the
/// blade-major transposed input; no expanded kernel is built.
LinearOutput linear_blade_gemm(const LinearInput& x, const LinearLayer& layer);

void linear_reference_forward(std::span<const float> x, std::span<float> out, std::size_t B,
                              const LinearLayer& layer);
void linear_blade_gemm_forward(std::span<const float> x, std::span<float> out, std::size_t B,
                               const LinearLayer& layer);

/// B * C_out * (C_in * flops(schedule) + N_B)
std::int64_t linear_flops(std::size_t B, std::size_t C_in, std::size_t C_out, const OpSchedule& schedule);

}  // namespace cliffkern
