#include "cliffkern/conv.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "detail/conv_kernels.hpp"
#include "detail/simd.hpp"

namespace cliffkern {

std::size_t native_vector_width() noexcept { return simd::kHaveAvx2 ? 8 : 1; }

KernelParams KernelParams::defaults() {
  KernelParams p{native_vector_width(), 1};
  if (const char* env = std::getenv("CLIFFKERN_VECTOR_WIDTH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || w < 1 || w > 64) {
      throw Error(Errc::ConfigInvalid, std::string("CLIFFKERN_VECTOR_WIDTH must be an integer in [1, 64], got '") +
                                           env + "'");
    }
    p.W = static_cast<std::size_t>(w);
  }
  return p;
}

namespace {

void check_layer_dims(const Dims& dims, const Signature& sig) {
  if (dims.k < 1 || dims.k > 3) throw Error(Errc::ShapeMismatch, "convolution supports k in {1, 2, 3}");
  if (sig.k() != dims.k) {
    throw Error(Errc::ShapeMismatch, "signature dimension " + std::to_string(sig.k()) +
                                         " differs from spatial dimension " + std::to_string(dims.k));
  }
}

KernelParams checked_params(KernelParams p) {
  if (p.W < 1 || p.U < 1) throw Error(Errc::ConfigInvalid, "W and U must be >= 1");
  return p;
}

}  // namespace

ConvLayer::ConvLayer(Dims dims, Signature sig, ConvFilters filters, ConvBias bias, KernelParams params)
    : dims_((check_layer_dims(dims, sig), dims)),
      sig_(std::move(sig)),
      table_(sig_),
      schedule_(build_schedule(table_)),
      filters_(std::move(filters)),
      bias_(std::move(bias)),
      params_(checked_params(params)),
      out_offsets_(spatial_offsets(dims_.k, dims_.d_out(), dims_.d_image)),
      filter_offsets_(spatial_offsets(dims_.k, dims_.d_filter, dims_.d_image)) {
  require_shape(filters_, conv_filters_shape(dims_), "ConvLayer filters");
  require_shape(bias_, conv_bias_shape(dims_), "ConvLayer bias");
  packed_filters_ = pack_filters(filters_, dims_);
  std::tie(path_, kernel_) = detail::select_packed_kernel(sig_, params_, false);
}

ConvLayer ConvLayer::with_schedule(OpSchedule schedule) const {
  if (schedule.signature() != sig_) throw Error(Errc::ConfigInvalid, "schedule belongs to a different signature");
  ConvLayer copy = *this;
  copy.schedule_ = std::move(schedule);
  std::tie(copy.path_, copy.kernel_) = detail::select_packed_kernel(sig_, params_, true);
  return copy;
}

ConvOutput conv_reference(const ConvInput& x, const ConvLayer& layer) {
  const Dims& d = layer.dims();
  require_shape(x, conv_input_shape(d), "conv_reference input");
  const std::size_t NB = d.n_blades(), Q = d.filter_positions(), P_in = d.image_positions(),
                    P_out = d.out_positions();
  const std::size_t pairs = d.C_in * d.C_out;
  const auto& pofs = layer.out_offsets();
  const auto& qofs = layer.filter_offsets();
  const ConvFilters& f = layer.filters();
  const ConvBias& bias = layer.bias();

  ConvOutput out(conv_output_shape(d));
  std::vector<double> acc(NB);
  std::vector<float> filt(NB);
  for (std::size_t b = 0; b < d.B; ++b) {
    for (std::size_t co = 0; co < d.C_out; ++co) {
      for (std::size_t p = 0; p < P_out; ++p) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t ci = 0; ci < d.C_in; ++ci) {
          for (std::size_t q = 0; q < Q; ++q) {
            for (std::size_t blade = 0; blade < NB; ++blade) {
              filt[blade] = f[(blade * pairs + ci * d.C_out + co) * Q + q];
            }
            const float* xin = x.data() + ((b * d.C_in + ci) * P_in + pofs[p] + qofs[q]) * NB;
            geometric_product_accumulate(filt, std::span<const float>(xin, NB), layer.table(), acc);
          }
        }
        float* o = out.data() + ((b * d.C_out + co) * P_out + p) * NB;
        for (std::size_t blade = 0; blade < NB; ++blade) {
          o[blade] = static_cast<float>(acc[blade] + bias[blade * d.C_out + co]);
        }
      }
    }
  }
  return out;
}

ExpandedKernel build_expanded_kernel(const ConvLayer& layer) {
  const Dims& d = layer.dims();
  const std::size_t NB = d.n_blades(), Q = d.filter_positions();
  const std::size_t pairs = d.C_in * d.C_out;
  const std::size_t rows = d.C_out * NB, cols = d.C_in * NB;
  const ConvFilters& f = layer.filters();
  ExpandedKernel kernel({rows, cols, Q});
  for (std::size_t co = 0; co < d.C_out; ++co) {
    for (std::size_t t = 0; t < NB; ++t) {
      for (std::size_t ci = 0; ci < d.C_in; ++ci) {
        for (std::size_t j = 0; j < NB; ++j) {
          // the only filter blade i with i ^ j == t
          const std::size_t i = t ^ j;
          const int coeff = layer.table().at(i, j).coeff;
          float* dst = kernel.data() + ((co * NB + t) * cols + ci * NB + j) * Q;
          const float* src = f.data() + (i * pairs + ci * d.C_out + co) * Q;
          for (std::size_t q = 0; q < Q; ++q) dst[q] = static_cast<float>(coeff) * src[q];
        }
      }
    }
  }
  return kernel;
}

ConvOutput conv_kernelized(const ConvInput& x, const ConvLayer& layer) {
  const Dims& d = layer.dims();
  require_shape(x, conv_input_shape(d), "conv_kernelized input");
  const std::size_t NB = d.n_blades(), Q = d.filter_positions(), P_in = d.image_positions(),
                    P_out = d.out_positions();
  const std::size_t rows = d.C_out * NB, cols = d.C_in * NB;
  const auto& pofs = layer.out_offsets();
  const auto& qofs = layer.filter_offsets();

  const ExpandedKernel kernel = build_expanded_kernel(layer);

  // (B, C_in, P, N_B) -> (B, C_in * N_B, P)
  FloatBuffer flat(d.B * cols * P_in);
  for (std::size_t b = 0; b < d.B; ++b)
    for (std::size_t ci = 0; ci < d.C_in; ++ci)
      for (std::size_t p = 0; p < P_in; ++p)
        for (std::size_t j = 0; j < NB; ++j)
          flat[(b * cols + ci * NB + j) * P_in + p] = x[((b * d.C_in + ci) * P_in + p) * NB + j];

  // Real-valued valid cross-correlation, (B, C_out * N_B, P_out).
  FloatBuffer flat_out(d.B * rows * P_out);
  for (std::size_t b = 0; b < d.B; ++b) {
    for (std::size_t r = 0; r < rows; ++r) {
      const float bias = layer.bias()[(r % NB) * d.C_out + r / NB];
      for (std::size_t p = 0; p < P_out; ++p) {
        float acc = 0.0f;
        for (std::size_t c = 0; c < cols; ++c) {
          const float* kr = kernel.data() + (r * cols + c) * Q;
          const float* xr = flat.data() + (b * cols + c) * P_in + pofs[p];
          for (std::size_t q = 0; q < Q; ++q) acc += kr[q] * xr[qofs[q]];
        }
        flat_out[(b * rows + r) * P_out + p] = acc + bias;
      }
    }
  }

  ConvOutput out(conv_output_shape(d));
  for (std::size_t b = 0; b < d.B; ++b)
    for (std::size_t co = 0; co < d.C_out; ++co)
      for (std::size_t p = 0; p < P_out; ++p)
        for (std::size_t t = 0; t < NB; ++t)
          out[((b * d.C_out + co) * P_out + p) * NB + t] = flat_out[(b * rows + co * NB + t) * P_out + p];
  return out;
}

PackedOutput conv_packed(const PackedInput& xp, const ConvLayer& layer) {
  const Dims& d = layer.dims();
  const std::size_t L = layer.params().L();
  require_shape(xp, packed_input_shape(d, L), "conv_packed input");
  PackedOutput out(packed_output_shape(d, L));
  layer.packed_kernel()(layer, xp.data(), out.data());
  return out;
}

namespace {

void require_size(std::span<const float> s, std::size_t n, const char* what) {
  if (s.size() != n) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": expected " + std::to_string(n) + " values, got " +
                                         std::to_string(s.size()));
  }
}

template <class Fn>
void forward_raw(std::span<const float> x, std::span<float> out, const ConvLayer& layer, Fn&& fn) {
  const Dims& d = layer.dims();
  const auto in_shape = conv_input_shape(d);
  require_size(x, shape_volume(in_shape), "conv input");
  require_size(out, shape_volume(conv_output_shape(d)), "conv output");
  const ConvOutput y = fn(ConvInput(in_shape, x));
  std::copy(y.values().begin(), y.values().end(), out.begin());
}

}  // namespace

void conv_reference_forward(std::span<const float> x, std::span<float> out, const ConvLayer& layer) {
  forward_raw(x, out, layer, [&](const ConvInput& in) { return conv_reference(in, layer); });
}

void conv_kernelized_forward(std::span<const float> x, std::span<float> out, const ConvLayer& layer) {
  forward_raw(x, out, layer, [&](const ConvInput& in) { return conv_kernelized(in, layer); });
}

void conv_packed_forward(std::span<const float> x, std::span<float> out, const ConvLayer& layer) {
  const std::size_t L = layer.params().L();
  forward_raw(x, out, layer, [&](const ConvInput& in) {
    return unpack_output(conv_packed(pack_input(in, layer.dims(), L), layer), layer.dims(), L);
  });
}

std::int64_t conv_flops(const Dims& dims, const OpSchedule& schedule) {
  const auto per_output = static_cast<std::int64_t>(dims.C_in * dims.filter_positions()) *
                              schedule_flop_count(schedule) +
                          static_cast<std::int64_t>(dims.n_blades());
  return static_cast<std::int64_t>(dims.B * dims.C_out * dims.out_positions()) * per_output;
}

}  // namespace cliffkern
