// Packed Clifford convolution kernels.
//
// Loop order: out-channel, in-channel, output position, package, filter tap.
// One package holds N_B x L floats (all blades of L batch elements). Its
// accumulators stay in registers across the filter taps of one in-channel;
// across in-channels they round-trip through the output buffer, which is
// initialised with the bias.

#include <vector>

#include "detail/conv_kernels.hpp"
#include "detail/simd.hpp"
#include "detail/static_schedule.hpp"

namespace cliffkern {

namespace {

struct PackedGeometry {
  std::size_t C_in, C_out, P_in, P_out, Q, npkg, NB, L;
  std::size_t pkg_stride;  // NB * L

  static PackedGeometry of(const ConvLayer& layer) {
    const Dims& d = layer.dims();
    const std::size_t L = layer.params().L();
    return {d.C_in, d.C_out, d.image_positions(), d.out_positions(), d.filter_positions(),
            d.B / L, d.n_blades(), L, d.n_blades() * L};
  }
};

void init_with_bias(const PackedGeometry& g, const float* bias, float* out) {
  for (std::size_t co = 0; co < g.C_out; ++co) {
    float* o = out + co * g.P_out * g.npkg * g.pkg_stride;
    for (std::size_t pp = 0; pp < g.P_out * g.npkg; ++pp, o += g.pkg_stride) {
      for (std::size_t blade = 0; blade < g.NB; ++blade) {
        const float b = bias[blade * g.C_out + co];
        for (std::size_t l = 0; l < g.L; ++l) o[blade * g.L + l] = b;
      }
    }
  }
}

// Small blade counts leave too few independent accumulator chains to cover
// FMA latency, so taps alternate between several accumulator banks.
constexpr int bank_count(int nb, int u) { return nb * u >= 8 ? 1 : 8 / (nb * u); }

template <detail::SigKey S, int W, int U>
void packed_kernel_static(const ConvLayer& layer, const float* in, float* out) {
  using Sched = detail::StaticSchedule<S>;
  using V = simd::Vec<W>;
  constexpr int NB = static_cast<int>(Sched::n_blades);
  constexpr int L = W * U;
  constexpr int Banks = bank_count(NB, U);

  const PackedGeometry g = PackedGeometry::of(layer);
  const float* filters = layer.packed_filters().data();
  const std::size_t* pofs = layer.out_offsets().data();
  const std::size_t* qofs = layer.filter_offsets().data();
  const std::size_t pos_stride = g.npkg * g.pkg_stride;

  init_with_bias(g, layer.bias().data(), out);

  for (std::size_t co = 0; co < g.C_out; ++co) {
    float* out_c = out + co * g.P_out * pos_stride;
    for (std::size_t ci = 0; ci < g.C_in; ++ci) {
      const float* f_cc = filters + (ci * g.C_out + co) * g.Q * NB;
      const float* in_c = in + ci * g.P_in * pos_stride;
      for (std::size_t p = 0; p < g.P_out; ++p) {
        const float* in_p = in_c + pofs[p] * pos_stride;
        float* out_p = out_c + p * pos_stride;
        for (std::size_t pkg = 0; pkg < g.npkg; ++pkg) {
          float* o = out_p + pkg * g.pkg_stride;
          const float* in_pkg = in_p + pkg * g.pkg_stride;

          V acc[Banks][NB][U];
          for (int t = 0; t < NB; ++t)
            for (int u = 0; u < U; ++u) {
              acc[0][t][u] = V::load(o + t * L + u * W);
              for (int bank = 1; bank < Banks; ++bank) acc[bank][t][u] = V::zero();
            }

          auto tap = [&]<int Bank>(std::size_t q) {
            const float* xi = in_pkg + qofs[q] * pos_stride;
            const float* fq = f_cc + q * NB;
            V x[NB][U];
            V f[NB];
            for (int blade = 0; blade < NB; ++blade) {
              f[blade] = V::broadcast(fq[blade]);
              for (int u = 0; u < U; ++u) x[blade][u] = V::load(xi + blade * L + u * W);
            }
            [&]<std::size_t... I>(std::index_sequence<I...>) {
              (
                  [&] {
                    constexpr auto term = Sched::terms[I];
                    for (int u = 0; u < U; ++u) {
                      if constexpr (term.negate) {
                        acc[Bank][term.out][u] = simd::fnmadd(f[term.a], x[term.b][u], acc[Bank][term.out][u]);
                      } else {
                        acc[Bank][term.out][u] = simd::fmadd(f[term.a], x[term.b][u], acc[Bank][term.out][u]);
                      }
                    }
                  }(),
                  ...);
            }(std::make_index_sequence<Sched::size>{});
          };

          std::size_t q = 0;
          if constexpr (Banks == 1) {
            for (; q < g.Q; ++q) tap.template operator()<0>(q);
          } else {
            for (; q + Banks <= g.Q; q += Banks) {
              [&]<int... B>(std::integer_sequence<int, B...>) {
                (tap.template operator()<B>(q + B), ...);
              }(std::make_integer_sequence<int, Banks>{});
            }
            for (; q < g.Q; ++q) tap.template operator()<0>(q);
          }

          for (int t = 0; t < NB; ++t)
            for (int u = 0; u < U; ++u) {
              V sum = acc[0][t][u];
              for (int bank = 1; bank < Banks; ++bank) sum = simd::add(sum, acc[bank][t][u]);
              sum.store(o + t * L + u * W);
            }
        }
      }
    }
  }
}

// Any W, U and schedule; the lane loops are left to the auto-vectorizer.
void packed_kernel_interpreted(const ConvLayer& layer, const float* in, float* out) {
  const PackedGeometry g = PackedGeometry::of(layer);
  const float* filters = layer.packed_filters().data();
  const auto& pofs = layer.out_offsets();
  const auto& qofs = layer.filter_offsets();
  const auto& terms = layer.schedule().terms();
  const std::size_t pos_stride = g.npkg * g.pkg_stride;
  const std::size_t L = g.L;

  init_with_bias(g, layer.bias().data(), out);
  std::vector<float> acc(g.pkg_stride);

  for (std::size_t co = 0; co < g.C_out; ++co) {
    for (std::size_t ci = 0; ci < g.C_in; ++ci) {
      const float* f_cc = filters + (ci * g.C_out + co) * g.Q * g.NB;
      for (std::size_t p = 0; p < g.P_out; ++p) {
        const float* in_p = in + (ci * g.P_in + pofs[p]) * pos_stride;
        float* out_p = out + (co * g.P_out + p) * pos_stride;
        for (std::size_t pkg = 0; pkg < g.npkg; ++pkg) {
          float* o = out_p + pkg * g.pkg_stride;
          std::copy(o, o + g.pkg_stride, acc.begin());
          for (std::size_t q = 0; q < g.Q; ++q) {
            const float* xi = in_p + qofs[q] * pos_stride + pkg * g.pkg_stride;
            const float* fq = f_cc + q * g.NB;
            for (const FmaTerm& term : terms) {
              const float fa = fq[term.a_blade.mask];
              const float* xb = xi + term.b_blade.mask * L;
              float* ot = acc.data() + term.out_blade.mask * L;
              if (term.negate) {
                for (std::size_t l = 0; l < L; ++l) ot[l] -= fa * xb[l];
              } else {
                for (std::size_t l = 0; l < L; ++l) ot[l] += fa * xb[l];
              }
            }
          }
          std::copy(acc.begin(), acc.end(), o);
        }
      }
    }
  }
}

template <int W, int U>
struct StaticKernelMaker {
  template <detail::SigKey S>
  static constexpr ConvLayer::PackedKernelFn get() {
    return &packed_kernel_static<S, W, U>;
  }
};

template <int W, int U>
ConvLayer::PackedKernelFn lookup(int slot) {
  static constexpr auto table = detail::make_dispatch_table<StaticKernelMaker<W, U>>();
  return table[static_cast<std::size_t>(slot)];
}

}  // namespace

namespace detail {

std::pair<KernelPath, ConvLayer::PackedKernelFn> select_packed_kernel(const Signature& sig,
                                                                      const KernelParams& params,
                                                                      bool force_interpreted) {
  const int slot = static_signature_slot(sig);
  if (!force_interpreted && slot >= 0) {
    ConvLayer::PackedKernelFn fn = nullptr;
    if (params.W == 1 && params.U == 1) fn = lookup<1, 1>(slot);
    if (params.W == 1 && params.U == 2) fn = lookup<1, 2>(slot);
    if (params.W == 1 && params.U == 4) fn = lookup<1, 4>(slot);
    if (params.W == 8 && params.U == 1) fn = lookup<8, 1>(slot);
    if (params.W == 8 && params.U == 2) fn = lookup<8, 2>(slot);
    if (params.W == 8 && params.U == 4) fn = lookup<8, 4>(slot);
    if (fn != nullptr) return {KernelPath::Specialized, fn};
  }
  return {KernelPath::Interpreted, &packed_kernel_interpreted};
}

}  // namespace detail

}  // namespace cliffkern
