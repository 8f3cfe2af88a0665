#pragma once

// Multivector activation: a scalar gate sigmoid(s), with s aggregated from K
// selected blades (weighted sum + bias, plain sum, or mean), scales every
// blade of the multivector. Tensors are (B, C, N_B).
//
// Variants, slowest to fastest:
//   activation_reference          gate recomputed for every output blade
//   activation_hoisted            one gate per (b, c), dual accumulators
//   activation_gathered           scalar kernel over the dense VPack
//   activation_packed             8-channel SIMD blocks over the VPack, any K and C
//   activation_specialized_looped branch-free per (mode, N_B) path, K == N_B, C % 8 == 0
//   activation_specialized        as above, channel block fully unrolled

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cliffkern/algebra.hpp"
#include "cliffkern/tensor.hpp"

namespace cliffkern {

/// Integer values are part of the C ABI.
enum class AggMode : int { Linear = 0, Sum = 1, Mean = 2 };

std::string to_string(AggMode mode);
AggMode parse_agg_mode(const std::string& text);

class ActivationConfig {
 public:
  /// `weight` is (C, K) row-major and `bias` is (C); both are required in
  /// Linear mode and rejected in Sum/Mean mode (ModeConfigMismatch).
  ActivationConfig(Signature sig, AggMode mode, std::vector<std::size_t> kernel_indices,
                   std::optional<std::vector<float>> weight = std::nullopt,
                   std::optional<std::vector<float>> bias = std::nullopt);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t n_blades() const noexcept { return sig_.n_blades(); }
  AggMode mode() const noexcept { return mode_; }
  const std::vector<std::size_t>& kernel_indices() const noexcept { return indices_; }
  std::size_t K() const noexcept { return indices_.size(); }
  /// Channel count fixed by the Linear parameters; nullopt in Sum/Mean mode.
  std::optional<std::size_t> channels() const noexcept { return channels_; }
  std::span<const float> weight() const noexcept { return weight_; }
  std::span<const float> bias() const noexcept { return bias_; }

 private:
  Signature sig_;
  AggMode mode_;
  std::vector<std::size_t> indices_;
  std::optional<std::size_t> channels_;
  std::vector<float> weight_;
  std::vector<float> bias_;
};

std::vector<std::size_t> activation_shape(std::size_t B, std::size_t C, std::size_t n_blades);

/// 1 / (1 + exp(-s)) in single precision.
float sigmoid(float s);

/// Vectorized sigmoid used by the SIMD variants; within 1e-6 of the exact
/// function on [-30, 30], saturating monotonically outside.
void sigmoid_vectorized(std::span<const float> in, std::span<float> out);

ActivationTensor activation_reference(const ActivationTensor& x, const ActivationConfig& cfg);
ActivationTensor activation_hoisted(const ActivationTensor& x, const ActivationConfig& cfg);

/// vpack[b, c, k] = x[b, c, kernel_indices[k]], shape (B, C, K).
VPack gather_vpack(const ActivationTensor& x, const ActivationConfig& cfg);

ActivationTensor activation_gathered(const ActivationTensor& x, const VPack& vpack, const ActivationConfig& cfg);
ActivationTensor activation_packed(const ActivationTensor& x, const VPack& vpack, const ActivationConfig& cfg);

/// Preconditions: K == N_B with N_B in {4, 8}, C % 8 == 0, and in Linear mode
/// kernel_indices == (0, ..., N_B - 1). Otherwise throws
/// SpecializationPreconditionViolated; use activation_packed instead.
ActivationTensor activation_specialized(const ActivationTensor& x, const ActivationConfig& cfg);
ActivationTensor activation_specialized_looped(const ActivationTensor& x, const ActivationConfig& cfg);

bool specialization_applies(std::size_t C, const ActivationConfig& cfg) noexcept;

/// Pre-gate aggregate s for every (b, c), shape (B, C).
std::vector<float> activation_gate_inputs(const ActivationTensor& x, const ActivationConfig& cfg);

/// Flop cost charged for one sigmoid evaluation in activation_flops.
inline constexpr std::int64_t kSigmoidFlops = 4;

/// Counted from the one-gate-per-(b, c) formulation:
///   Linear: B*C*(2K + 1 + SIG + N_B)
///   Sum:    B*C*(K - 1 + SIG + N_B)
///   Mean:   B*C*(K + SIG + N_B)
std::int64_t activation_flops(std::size_t B, std::size_t C, std::size_t n_blades, std::size_t K, AggMode mode,
                              std::int64_t sigmoid_flops = kSigmoidFlops);

}  // namespace cliffkern
