#pragma once

// Benchmark harness: Cartesian parameter sweeps over one layer kind, timed
// per variant, reported as FLOP-model throughput.
//
// Variants per kind:
//   conv1d/2d/3d  reference, kernelized, packed (pack + kernel + unpack), packed_kernel (kernel only)
//   linear        reference, kernelized, traced, gemm
//   activation    baseline, hoisted, gathered, packed, specialized_looped, specialized
//
// Benchmarks are single-threaded; pin the process to one core when
// measuring (for example `taskset -c 2 cliffbench bench ...`).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliffkern/activation.hpp"
#include "cliffkern/algebra.hpp"

namespace cliffkern {

enum class LayerKind { Conv1d, Conv2d, Conv3d, Linear, Activation };

std::string to_string(LayerKind kind);
/// "conv1d", "conv2d", "conv3d", "linear", "activation".
LayerKind parse_layer_kind(const std::string& text);
bool is_conv(LayerKind kind) noexcept;

enum class TimerKind { WallClock, CycleCounter };

TimerKind parse_timer_kind(const std::string& text);
/// True when this build can read a cycle counter (x86 TSC).
bool cycle_counter_available() noexcept;

std::vector<std::string> default_variants(LayerKind kind);

struct BenchConfig {
  LayerKind kind = LayerKind::Conv2d;
  /// Algebra dimension for linear / activation; conv kinds use their spatial
  /// dimension and `k` is ignored.
  std::size_t k = 2;
  /// Defaults to the Euclidean signature (1, ..., 1).
  std::optional<Signature> signature;

  // Sweep lists; every combination is one sweep point.
  std::vector<std::size_t> B{8};
  std::vector<std::size_t> C_in{4};
  std::vector<std::size_t> C_out{4};
  /// When non-empty, replaces C_in and C_out with C_in = C_out = C.
  std::vector<std::size_t> C;
  std::vector<std::size_t> d_image{12};
  std::vector<std::size_t> d_filter{3};
  /// Packed conv variants only.
  std::vector<std::size_t> W;  // empty: KernelParams::defaults().W
  std::vector<std::size_t> U{1};

  // Activation only; C_in is the channel count. K = 0 means K = N_B.
  AggMode mode = AggMode::Mean;
  std::vector<std::size_t> K{0};

  std::vector<std::string> variants;  // empty: default_variants(kind)
  std::size_t repetitions = 5;
  std::size_t warmup = 1;
  TimerKind timer = TimerKind::WallClock;

  bool verify = false;
  /// Verification is skipped for points whose reference output has more
  /// elements than this, or whose reference is estimated above
  /// `verify_max_flops`.
  std::size_t verify_max_elements = std::size_t{1} << 22;
  std::int64_t verify_max_flops = std::int64_t{1} << 32;

  std::uint64_t seed = 1;
};

enum class Verification { NotRequested, Passed, Skipped };

struct BenchRecord {
  std::string kind;  // "conv2d", "linear", "activation_mean_K8", ...
  std::string variant;
  std::size_t k = 0;
  std::size_t B = 0, C_in = 0, C_out = 0, d_image = 0, d_filter = 0;
  std::size_t W = 0, U = 0;  // 0 when the variant has no such knob
  std::int64_t flops = 0;
  double median_s = 0.0;
  double min_s = 0.0;
  double flops_per_s = 0.0;  // flops / median_s
  std::size_t bytes = 0;     // working set touched by the variant, 4 bytes per element

  std::optional<double> flops_per_cycle;
  Verification verification = Verification::NotRequested;
  double max_error = 0.0;
  /// median / min > 1.2.
  bool unstable = false;
};

/// Throws ConfigInvalid for malformed configs and VerificationFailed when a
/// verified variant disagrees with the reference beyond tolerance
/// (relative 1e-4 for conv and linear, absolute 1e-5 for activation).
std::vector<BenchRecord> run_sweep(const BenchConfig& cfg);

/// Fixed column order:
/// kind,variant,k,B,C_in,C_out,d_image,d_filter,W,U,flops,median_s,min_s,flops_per_s,bytes
inline constexpr const char* kCsvHeader =
    "kind,variant,k,B,C_in,C_out,d_image,d_filter,W,U,flops,median_s,min_s,flops_per_s,bytes";

/// Doubles are written in shortest round-trip form, so parse_csv(emit_csv(r))
/// recovers every CSV field exactly.
std::string emit_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_csv(const std::string& text);

struct PlotSpec {
  /// x axis: "C" (C_in, the network-size axis), "C_out", "B", "d_image",
  /// "d_filter", "W", "U" or "bytes".
  std::string axis = "C";
  std::string title;
  bool log_x = false;
  /// Vertical markers in bytes, drawn only on the "bytes" axis.
  std::vector<std::pair<std::string, double>> cache_sizes;
};

/// SVG line chart of throughput (GFLOP/s) against `spec.axis`, one line per
/// variant. Throws AxisMismatch for an empty record list, records of
/// different kinds, an unknown axis, or duplicate x values within a variant.
std::string emit_plot(const std::vector<BenchRecord>& records, const PlotSpec& spec = {});

/// Flops per vector element moved inside one packed computation:
/// 8 N_B / (8 + 1 / U).
double local_operation_intensity(std::size_t n_blades, std::size_t U);

}  // namespace cliffkern
