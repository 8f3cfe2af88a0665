#include "cliffkern/linear.hpp"

#include <algorithm>

#include "detail/simd.hpp"

namespace cliffkern {

std::vector<std::size_t> linear_input_shape(std::size_t B, std::size_t C_in, std::size_t n_blades) {
  return {B, C_in, n_blades};
}
std::vector<std::size_t> linear_output_shape(std::size_t B, std::size_t C_out, std::size_t n_blades) {
  return {B, C_out, n_blades};
}
std::vector<std::size_t> linear_weight_shape(std::size_t C_in, std::size_t C_out, std::size_t n_blades) {
  return {n_blades, C_out, C_in};
}
std::vector<std::size_t> linear_bias_shape(std::size_t C_out, std::size_t n_blades) { return {n_blades, C_out}; }

LinearLayer::LinearLayer(Signature sig, std::size_t C_in, std::size_t C_out, LinearWeight weight,
                         LinearBias bias)
    : sig_(std::move(sig)),
      C_in_(C_in),
      C_out_(C_out),
      table_(sig_),
      schedule_(build_schedule(table_)),
      weight_(std::move(weight)),
      bias_(std::move(bias)) {
  if (sig_.k() > 3) throw Error(Errc::ShapeMismatch, "linear layers support k in {1, 2, 3}");
  if (C_in_ == 0 || C_out_ == 0) throw Error(Errc::ShapeMismatch, "channel counts must be >= 1");
  require_shape(weight_, linear_weight_shape(C_in_, C_out_, n_blades()), "LinearLayer weight");
  require_shape(bias_, linear_bias_shape(C_out_, n_blades()), "LinearLayer bias");
}

LinearLayer LinearLayer::with_schedule(OpSchedule schedule) const {
  if (schedule.signature() != sig_) throw Error(Errc::ConfigInvalid, "schedule belongs to a different signature");
  LinearLayer copy = *this;
  copy.schedule_ = std::move(schedule);
  return copy;
}

namespace {

std::size_t checked_batch(const LinearInput& x, const LinearLayer& layer, const char* what) {
  if (x.shape().size() != 3 || x.shape()[0] == 0) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": input must be (B, C_in, N_B)");
  }
  const std::size_t B = x.shape()[0];
  require_shape(x, linear_input_shape(B, layer.C_in(), layer.n_blades()), what);
  return B;
}

float dot(const float* a, const float* b, std::size_t n) {
  using V = simd::Vec<8>;
  std::size_t i = 0;
  float total = 0.0f;
  if constexpr (simd::kHaveAvx2) {
    V acc0 = V::zero(), acc1 = V::zero();
    for (; i + 16 <= n; i += 16) {
      acc0 = simd::fmadd(V::load(a + i), V::load(b + i), acc0);
      acc1 = simd::fmadd(V::load(a + i + 8), V::load(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) acc0 = simd::fmadd(V::load(a + i), V::load(b + i), acc0);
    alignas(32) float lanes[8];
    simd::add(acc0, acc1).store(lanes);
    for (float v : lanes) total += v;
  }
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

LinearOutput linear_reference(const LinearInput& x, const LinearLayer& layer) {
  const std::size_t B = checked_batch(x, layer, "linear_reference");
  const std::size_t NB = layer.n_blades(), C_in = layer.C_in(), C_out = layer.C_out();
  LinearOutput out(linear_output_shape(B, C_out, NB));
  std::vector<double> acc(NB);
  std::vector<float> w(NB);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t co = 0; co < C_out; ++co) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t ci = 0; ci < C_in; ++ci) {
        for (std::size_t blade = 0; blade < NB; ++blade) w[blade] = layer.weight()[(blade * C_out + co) * C_in + ci];
        geometric_product_accumulate(w, std::span<const float>(x.data() + (b * C_in + ci) * NB, NB), layer.table(),
                                     acc);
      }
      for (std::size_t blade = 0; blade < NB; ++blade) {
        out[(b * C_out + co) * NB + blade] = static_cast<float>(acc[blade] + layer.bias()[blade * C_out + co]);
      }
    }
  }
  return out;
}

LinearOutput linear_kernelized(const LinearInput& x, const LinearLayer& layer) {
  const std::size_t B = checked_batch(x, layer, "linear_kernelized");
  const std::size_t NB = layer.n_blades(), C_in = layer.C_in(), C_out = layer.C_out();
  const std::size_t rows = C_out * NB, cols = C_in * NB;
  FloatBuffer kernel(rows * cols);
  for (std::size_t co = 0; co < C_out; ++co)
    for (std::size_t t = 0; t < NB; ++t)
      for (std::size_t ci = 0; ci < C_in; ++ci)
        for (std::size_t j = 0; j < NB; ++j) {
          const std::size_t i = t ^ j;
          kernel[(co * NB + t) * cols + ci * NB + j] =
              static_cast<float>(layer.table().at(i, j).coeff) * layer.weight()[(i * C_out + co) * C_in + ci];
        }
  LinearOutput out(linear_output_shape(B, C_out, NB));
  for (std::size_t b = 0; b < B; ++b) {
    const float* xb = x.data() + b * cols;  // (C_in, N_B) row is already channel-blade flat
    for (std::size_t r = 0; r < rows; ++r) {
      float acc = 0.0f;
      for (std::size_t c = 0; c < cols; ++c) acc += kernel[r * cols + c] * xb[c];
      out[b * rows + r] = acc + layer.bias()[(r % NB) * C_out + r / NB];
    }
  }
  return out;
}

LinearOutput linear_traced(const LinearInput& x, const LinearLayer& layer) {
  const std::size_t B = checked_batch(x, layer, "linear_traced");
  const std::size_t NB = layer.n_blades(), C_in = layer.C_in(), C_out = layer.C_out();
  const auto& terms = layer.schedule().terms();
  const float* w = layer.weight().data();
  LinearOutput out(linear_output_shape(B, C_out, NB));
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t co = 0; co < C_out; ++co) {
      float* o = out.data() + (b * C_out + co) * NB;
      for (std::size_t t = 0; t < NB; ++t) o[t] = layer.bias()[t * C_out + co];
      for (std::size_t ci = 0; ci < C_in; ++ci) {
        const float* xi = x.data() + (b * C_in + ci) * NB;
        for (const FmaTerm& term : terms) {
          const float prod = w[(term.a_blade.mask * C_out + co) * C_in + ci] * xi[term.b_blade.mask];
          o[term.out_blade.mask] += term.negate ? -prod : prod;
        }
      }
    }
  }
  return out;
}

LinearOutput linear_blade_gemm(const LinearInput& x, const LinearLayer& layer) {
  const std::size_t B = checked_batch(x, layer, "linear_blade_gemm");
  const std::size_t NB = layer.n_blades(), C_in = layer.C_in(), C_out = layer.C_out();

  // (B, C_in, N_B) -> (N_B, B, C_in)
  FloatBuffer xt(NB * B * C_in);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t ci = 0; ci < C_in; ++ci)
      for (std::size_t j = 0; j < NB; ++j) xt[(j * B + b) * C_in + ci] = x[(b * C_in + ci) * NB + j];

  // (N_B, B, C_out) accumulators, bias first.
  FloatBuffer acc(NB * B * C_out);
  for (std::size_t t = 0; t < NB; ++t)
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t co = 0; co < C_out; ++co) acc[(t * B + b) * C_out + co] = layer.bias()[t * C_out + co];

  const float* w = layer.weight().data();
  for (const FmaTerm& term : layer.schedule().terms()) {
    const float* xj = xt.data() + term.b_blade.mask * B * C_in;
    const float* wi = w + term.a_blade.mask * C_out * C_in;
    float* ot = acc.data() + term.out_blade.mask * B * C_out;
    const float sign = term.negate ? -1.0f : 1.0f;
    for (std::size_t b = 0; b < B; ++b) {
      const float* xrow = xj + b * C_in;
      float* orow = ot + b * C_out;
      for (std::size_t co = 0; co < C_out; ++co) orow[co] += sign * dot(xrow, wi + co * C_in, C_in);
    }
  }

  LinearOutput out(linear_output_shape(B, C_out, NB));
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t co = 0; co < C_out; ++co)
      for (std::size_t t = 0; t < NB; ++t) out[(b * C_out + co) * NB + t] = acc[(t * B + b) * C_out + co];
  return out;
}

namespace {

template <class Fn>
void linear_raw(std::span<const float> x, std::span<float> out, std::size_t B, const LinearLayer& layer, Fn&& fn) {
  const auto in_shape = linear_input_shape(B, layer.C_in(), layer.n_blades());
  const std::size_t n_out = B * layer.C_out() * layer.n_blades();
  if (out.size() != n_out) throw Error(Errc::ShapeMismatch, "linear output buffer has the wrong size");
  const LinearOutput y = fn(LinearInput(in_shape, x));
  std::copy(y.values().begin(), y.values().end(), out.begin());
}

}  // namespace

void linear_reference_forward(std::span<const float> x, std::span<float> out, std::size_t B,
                              const LinearLayer& layer) {
  linear_raw(x, out, B, layer, [&](const LinearInput& in) { return linear_reference(in, layer); });
}

void linear_blade_gemm_forward(std::span<const float> x, std::span<float> out, std::size_t B,
                               const LinearLayer& layer) {
  linear_raw(x, out, B, layer, [&](const LinearInput& in) { return linear_blade_gemm(in, layer); });
}

std::int64_t linear_flops(std::size_t B, std::size_t C_in, std::size_t C_out, const OpSchedule& schedule) {
  return static_cast<std::int64_t>(B * C_out) *
         (static_cast<std::int64_t>(C_in) * schedule_flop_count(schedule) +
          static_cast<std::int64_t>(schedule.n_blades()));
}

}  // namespace cliffkern
