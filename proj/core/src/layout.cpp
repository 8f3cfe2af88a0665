#include "cliffkern/layout.hpp"

#include <sstream>

namespace cliffkern {

std::string to_string(LayoutTag tag) {
  switch (tag) {
    case LayoutTag::Generic: return "Generic";
    case LayoutTag::ConvInput: return "ConvInput";
    case LayoutTag::ConvOutput: return "ConvOutput";
    case LayoutTag::ConvFilters: return "ConvFilters";
    case LayoutTag::ConvBias: return "ConvBias";
    case LayoutTag::PackedInput: return "PackedInput";
    case LayoutTag::PackedOutput: return "PackedOutput";
    case LayoutTag::PackedFilters: return "PackedFilters";
    case LayoutTag::ExpandedKernel: return "ExpandedKernel";
    case LayoutTag::LinearInput: return "LinearInput";
    case LayoutTag::LinearOutput: return "LinearOutput";
    case LayoutTag::LinearWeight: return "LinearWeight";
    case LayoutTag::LinearBias: return "LinearBias";
    case LayoutTag::Activation: return "Activation";
    case LayoutTag::VPack: return "VPack";
  }
  return "Unknown";
}

std::string shape_to_string(std::span<const std::size_t> shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ')';
  return os.str();
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

void require_divisible(const Dims& d, std::size_t L) {
  if (L == 0 || d.B % L != 0) {
    throw Error(Errc::BatchNotDivisible,
                "batch " + std::to_string(d.B) + " is not divisible by package length " + std::to_string(L));
  }
}

}  // namespace

Dims Dims::make(std::size_t k, std::size_t B, std::size_t C_in, std::size_t C_out, std::size_t d_image,
                std::size_t d_filter) {
  if (k < 1 || B < 1 || C_in < 1 || C_out < 1 || d_image < 1 || d_filter < 1) {
    throw Error(Errc::ShapeMismatch, "all dimensions must be >= 1");
  }
  if (d_filter > d_image) {
    throw Error(Errc::ShapeMismatch, "d_filter " + std::to_string(d_filter) + " exceeds d_image " +
                                         std::to_string(d_image));
  }
  return Dims{k, B, C_in, C_out, d_image, d_filter};
}

std::size_t Dims::image_positions() const noexcept { return ipow(d_image, k); }
std::size_t Dims::filter_positions() const noexcept { return ipow(d_filter, k); }
std::size_t Dims::out_positions() const noexcept { return ipow(d_out(), k); }

std::vector<std::size_t> conv_input_shape(const Dims& d) { return {d.B, d.C_in, d.image_positions(), d.n_blades()}; }
std::vector<std::size_t> conv_output_shape(const Dims& d) { return {d.B, d.C_out, d.out_positions(), d.n_blades()}; }
std::vector<std::size_t> conv_filters_shape(const Dims& d) {
  return {d.n_blades(), d.C_in, d.C_out, d.filter_positions()};
}
std::vector<std::size_t> conv_bias_shape(const Dims& d) { return {d.n_blades(), d.C_out}; }
std::vector<std::size_t> packed_input_shape(const Dims& d, std::size_t L) {
  require_divisible(d, L);
  return {d.C_in, d.image_positions(), d.B / L, d.n_blades(), L};
}
std::vector<std::size_t> packed_output_shape(const Dims& d, std::size_t L) {
  require_divisible(d, L);
  return {d.C_out, d.out_positions(), d.B / L, d.n_blades(), L};
}
std::vector<std::size_t> packed_filters_shape(const Dims& d) {
  return {d.C_in, d.C_out, d.filter_positions(), d.n_blades()};
}

std::vector<std::size_t> spatial_offsets(std::size_t k, std::size_t side, std::size_t stride_side) {
  const std::size_t count = ipow(side, k);
  std::vector<std::size_t> out(count);
  for (std::size_t lin = 0; lin < count; ++lin) {
    std::size_t rem = lin, offset = 0, scale = 1;
    for (std::size_t axis = 0; axis < k; ++axis) {  // last coordinate first
      offset += (rem % side) * scale;
      rem /= side;
      scale *= stride_side;
    }
    out[lin] = offset;
  }
  return out;
}

// Both directions of the batch-packing permutation share one index walk.
namespace {

template <bool ToPacked, class Protocol, class Packed>
void permute_batch(Protocol& proto, Packed& packed, std::size_t B, std::size_t C, std::size_t P,
                   std::size_t NB, std::size_t L) {
  const std::size_t npkg = B / L;
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t pkg = b / L, lane = b % L;
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t p = 0; p < P; ++p) {
        const std::size_t src = ((b * C + c) * P + p) * NB;
        const std::size_t dst = (((c * P + p) * npkg + pkg) * NB) * L + lane;
        for (std::size_t blade = 0; blade < NB; ++blade) {
          if constexpr (ToPacked) {
            packed[dst + blade * L] = proto[src + blade];
          } else {
            proto[src + blade] = packed[dst + blade * L];
          }
        }
      }
    }
  }
}

}  // namespace

PackedInput pack_input(const ConvInput& x, const Dims& dims, std::size_t L) {
  require_shape(x, conv_input_shape(dims), "pack_input");
  PackedInput out(packed_input_shape(dims, L));
  permute_batch<true>(x, out, dims.B, dims.C_in, dims.image_positions(), dims.n_blades(), L);
  return out;
}

ConvInput unpack_input(const PackedInput& xp, const Dims& dims, std::size_t L) {
  require_shape(xp, packed_input_shape(dims, L), "unpack_input");
  ConvInput out(conv_input_shape(dims));
  permute_batch<false>(out, xp, dims.B, dims.C_in, dims.image_positions(), dims.n_blades(), L);
  return out;
}

PackedOutput pack_output(const ConvOutput& y, const Dims& dims, std::size_t L) {
  require_shape(y, conv_output_shape(dims), "pack_output");
  PackedOutput out(packed_output_shape(dims, L));
  permute_batch<true>(y, out, dims.B, dims.C_out, dims.out_positions(), dims.n_blades(), L);
  return out;
}

ConvOutput unpack_output(const PackedOutput& yp, const Dims& dims, std::size_t L) {
  require_shape(yp, packed_output_shape(dims, L), "unpack_output");
  ConvOutput out(conv_output_shape(dims));
  permute_batch<false>(out, yp, dims.B, dims.C_out, dims.out_positions(), dims.n_blades(), L);
  return out;
}

PackedFilters pack_filters(const ConvFilters& f, const Dims& dims) {
  require_shape(f, conv_filters_shape(dims), "pack_filters");
  PackedFilters out(packed_filters_shape(dims));
  const std::size_t NB = dims.n_blades(), Q = dims.filter_positions();
  const std::size_t pairs = dims.C_in * dims.C_out;
  for (std::size_t blade = 0; blade < NB; ++blade)
    for (std::size_t cc = 0; cc < pairs; ++cc)
      for (std::size_t q = 0; q < Q; ++q) out[(cc * Q + q) * NB + blade] = f[(blade * pairs + cc) * Q + q];
  return out;
}

ConvFilters unpack_filters(const PackedFilters& fp, const Dims& dims) {
  require_shape(fp, packed_filters_shape(dims), "unpack_filters");
  ConvFilters out(conv_filters_shape(dims));
  const std::size_t NB = dims.n_blades(), Q = dims.filter_positions();
  const std::size_t pairs = dims.C_in * dims.C_out;
  for (std::size_t blade = 0; blade < NB; ++blade)
    for (std::size_t cc = 0; cc < pairs; ++cc)
      for (std::size_t q = 0; q < Q; ++q) out[(blade * pairs + cc) * Q + q] = fp[(cc * Q + q) * NB + blade];
  return out;
}

ConvInput zero_pad_batch(const ConvInput& x, const Dims& dims, std::size_t L, Dims& padded_dims) {
  require_shape(x, conv_input_shape(dims), "zero_pad_batch");
  if (L == 0) throw Error(Errc::BatchNotDivisible, "package length must be positive");
  padded_dims = dims;
  padded_dims.B = (dims.B + L - 1) / L * L;
  ConvInput out(conv_input_shape(padded_dims));
  std::copy(x.values().begin(), x.values().end(), out.values().begin());
  return out;
}

}  // namespace cliffkern
