#include "cliffkern/c_api.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "cliffkern/activation.hpp"
#include "cliffkern/conv.hpp"
#include "cliffkern/linear.hpp"

struct ck_conv {
  cliffkern::ConvLayer layer;
};

struct ck_linear {
  cliffkern::LinearLayer layer;
};

struct ck_activation {
  cliffkern::ActivationConfig cfg;
  std::size_t C;
};

namespace {

thread_local std::string g_last_error;

int status_of(cliffkern::Errc code) {
  using cliffkern::Errc;
  switch (code) {
    case Errc::InvalidSignature: return CK_ERR_INVALID_SIGNATURE;
    case Errc::InvalidMetricValue: return CK_ERR_INVALID_METRIC_VALUE;
    case Errc::DimensionMismatch: return CK_ERR_DIMENSION_MISMATCH;
    case Errc::ShapeMismatch: return CK_ERR_SHAPE_MISMATCH;
    case Errc::BatchNotDivisible: return CK_ERR_BATCH_NOT_DIVISIBLE;
    case Errc::IndexOutOfRange: return CK_ERR_INDEX_OUT_OF_RANGE;
    case Errc::ModeConfigMismatch: return CK_ERR_MODE_CONFIG_MISMATCH;
    case Errc::SpecializationPreconditionViolated: return CK_ERR_SPECIALIZATION_PRECONDITION;
    case Errc::ConfigInvalid: return CK_ERR_CONFIG_INVALID;
    case Errc::VerificationFailed: return CK_ERR_VERIFICATION_FAILED;
    case Errc::AxisMismatch: return CK_ERR_AXIS_MISMATCH;
    case Errc::IoError: return CK_ERR_IO;
  }
  return CK_ERR_INTERNAL;
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CK_OK;
  } catch (const cliffkern::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CK_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CK_ERR_INTERNAL;
  }
}

cliffkern::Signature make_signature(std::size_t k, const int* g) {
  return cliffkern::Signature(std::span<const int>(g, k));
}

std::span<const float> in_span(const float* p, std::size_t n) { return {p, n}; }

}  // namespace

extern "C" {

const char* ck_last_error(void) { return g_last_error.c_str(); }

const char* ck_version(void) { return "0.1.0"; }

int ck_conv_create(ck_conv** out, size_t k, const int* signature, size_t B, size_t C_in, size_t C_out,
                   size_t d_image, size_t d_filter, const float* filters, size_t filters_len, const float* bias,
                   size_t bias_len, size_t W, size_t U) {
  if (!out || !filters || !bias || !signature) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  return guarded([&] {
    using namespace cliffkern;
    const Dims dims = Dims::make(k, B, C_in, C_out, d_image, d_filter);
    KernelParams params = KernelParams::defaults();
    if (W != 0) params.W = W;
    params.U = U == 0 ? 1 : U;
    auto* h = new ck_conv{ConvLayer(dims, make_signature(k, signature),
                                    ConvFilters(conv_filters_shape(dims), in_span(filters, filters_len)),
                                    ConvBias(conv_bias_shape(dims), in_span(bias, bias_len)), params)};
    *out = h;
  });
}

int ck_conv_output_len(const ck_conv* h, size_t* len) {
  if (!h || !len) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  *len = cliffkern::shape_volume(cliffkern::conv_output_shape(h->layer.dims()));
  return CK_OK;
}

int ck_conv_forward(const ck_conv* h, int impl, const float* input, size_t input_len, float* output,
                    size_t output_len) {
  if (!h || !input || !output) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  return guarded([&] {
    using namespace cliffkern;
    const std::span<const float> x(input, input_len);
    const std::span<float> y(output, output_len);
    switch (impl) {
      case CK_CONV_REFERENCE: conv_reference_forward(x, y, h->layer); break;
      case CK_CONV_KERNELIZED: conv_kernelized_forward(x, y, h->layer); break;
      case CK_CONV_PACKED: conv_packed_forward(x, y, h->layer); break;
      default: throw Error(Errc::ConfigInvalid, "unknown conv implementation " + std::to_string(impl));
    }
  });
}

void ck_conv_destroy(ck_conv* h) { delete h; }

int ck_linear_create(ck_linear** out, size_t k, const int* signature, size_t C_in, size_t C_out,
                     const float* weight, size_t weight_len, const float* bias, size_t bias_len) {
  if (!out || !weight || !bias || !signature) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  return guarded([&] {
    using namespace cliffkern;
    const Signature sig = make_signature(k, signature);
    const std::size_t NB = sig.n_blades();
    *out = new ck_linear{LinearLayer(sig, C_in, C_out,
                                     LinearWeight(linear_weight_shape(C_in, C_out, NB), in_span(weight, weight_len)),
                                     LinearBias(linear_bias_shape(C_out, NB), in_span(bias, bias_len)))};
  });
}

int ck_linear_forward(const ck_linear* h, int impl, size_t B, const float* input, size_t input_len, float* output,
                      size_t output_len) {
  if (!h || !input || !output) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  return guarded([&] {
    using namespace cliffkern;
    const std::span<const float> x(input, input_len);
    const std::span<float> y(output, output_len);
    switch (impl) {
      case 0: linear_reference_forward(x, y, B, h->layer); break;
      case 1: linear_blade_gemm_forward(x, y, B, h->layer); break;
      default: throw Error(Errc::ConfigInvalid, "unknown linear implementation " + std::to_string(impl));
    }
  });
}

void ck_linear_destroy(ck_linear* h) { delete h; }

int ck_activation_create(ck_activation** out, size_t k, const int* signature, int mode,
                         const size_t* kernel_indices, size_t K, size_t C, const float* weight, size_t weight_len,
                         const float* bias, size_t bias_len) {
  if (!out || !signature || !kernel_indices) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  return guarded([&] {
    using namespace cliffkern;
    if (mode < 0 || mode > 2) throw Error(Errc::ConfigInvalid, "aggregation mode must be 0, 1 or 2");
    if (C == 0) throw Error(Errc::ShapeMismatch, "channel count must be >= 1");
    std::optional<std::vector<float>> w, b;
    if (weight) w.emplace(weight, weight + weight_len);
    if (bias) b.emplace(bias, bias + bias_len);
    ActivationConfig cfg(make_signature(k, signature), static_cast<AggMode>(mode),
                         std::vector<std::size_t>(kernel_indices, kernel_indices + K), std::move(w), std::move(b));
    if (cfg.channels() && *cfg.channels() != C) {
      throw Error(Errc::ModeConfigMismatch, "weight and bias are sized for a different channel count");
    }
    *out = new ck_activation{std::move(cfg), C};
  });
}

int ck_activation_forward(const ck_activation* h, size_t B, const float* input, size_t input_len, float* output,
                          size_t output_len) {
  if (!h || !input || !output) {
    g_last_error = "null argument";
    return CK_ERR_NULL_ARGUMENT;
  }
  return guarded([&] {
    using namespace cliffkern;
    const auto shape = activation_shape(B, h->C, h->cfg.n_blades());
    if (output_len != shape_volume(shape)) throw Error(Errc::ShapeMismatch, "activation output buffer has the wrong size");
    const ActivationTensor x(shape, std::span<const float>(input, input_len));
    const ActivationTensor y = specialization_applies(h->C, h->cfg) ? activation_specialized(x, h->cfg)
                                                                    : activation_packed(x, gather_vpack(x, h->cfg), h->cfg);
    std::copy(y.values().begin(), y.values().end(), output);
  });
}

void ck_activation_destroy(ck_activation* h) { delete h; }

}  // extern "C"
