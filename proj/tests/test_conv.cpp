#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "cliffkern/conv.hpp"
#include "cliffkern/error.hpp"
#include "oracles.hpp"

using namespace cliffkern;

namespace {

struct Instance {
  Dims dims;
  Signature sig;
  ConvInput x;
  ConvFilters f;
  ConvBias bias;
};

Instance random_instance(const Signature& sig, std::size_t B, std::size_t C_in, std::size_t C_out,
                         std::size_t d_image, std::size_t d_filter, std::mt19937_64& rng) {
  const Dims d = Dims::make(sig.k(), B, C_in, C_out, d_image, d_filter);
  Instance in{d, sig, ConvInput(conv_input_shape(d)), ConvFilters(conv_filters_shape(d)), ConvBias(conv_bias_shape(d))};
  oracle::randomize(in.x.values(), rng);
  oracle::randomize(in.f.values(), rng);
  oracle::randomize(in.bias.values(), rng);
  return in;
}

std::vector<float> oracle_out(const Instance& in) {
  const Dims& d = in.dims;
  return oracle::conv(d.k, d.B, d.C_in, d.C_out, d.d_image, d.d_filter, in.x.values(), in.f.values(),
                      in.bias.values(), oracle::g_of(in.sig));
}

std::vector<float> packed_out(const Instance& in, KernelParams p) {
  const ConvLayer layer(in.dims, in.sig, in.f, in.bias, p);
  std::vector<float> y(shape_volume(conv_output_shape(in.dims)));
  conv_packed_forward(in.x.values(), y, layer);
  return y;
}

}  // namespace

TEST(Conv, FrozenComplexConv1d) {
  // e1^2 = -1: blades (re, im). x = [1+2i, 3-i, i], f = [2-i, 1+i], bias 0.5.
  const Signature sig({-1});
  const Dims d = Dims::make(1, 1, 1, 1, 3, 2);
  const float xv[] = {1, 2, 3, -1, 0, 1};
  const float fv[] = {2, 1, -1, 1};  // (blade, ci, co, q): re taps then im taps
  const float bv[] = {0.5f, 0.0f};
  const ConvLayer layer(d, sig, ConvFilters(conv_filters_shape(d), fv), ConvBias(conv_bias_shape(d), bv),
                        KernelParams{1, 1});
  const ConvInput x(conv_input_shape(d), xv);
  const std::vector<float> expected{8.5f, 5.0f, 4.5f, -4.0f};
  for (const ConvOutput& y : {conv_reference(x, layer), conv_kernelized(x, layer)}) {
    ASSERT_EQ(y.values().size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_FLOAT_EQ(y[i], expected[i]);
  }
  std::vector<float> y(4);
  conv_packed_forward(xv, y, layer);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_FLOAT_EQ(y[i], expected[i]);
}

TEST(Conv, FilterMultipliesFromTheLeft) {
  // e1 * e2 = +e12 but e2 * e1 = -e12.
  const Signature sig({1, 1});
  const Dims d = Dims::make(2, 8, 1, 1, 1, 1);
  ConvFilters f(conv_filters_shape(d));
  f[1] = 1.0f;  // filter = e1
  ConvInput x(conv_input_shape(d));
  for (std::size_t b = 0; b < 8; ++b) x[b * 4 + 2] = 1.0f;  // input = e2
  const ConvLayer layer(d, sig, f, ConvBias(conv_bias_shape(d)));
  std::vector<float> y(8 * 4);
  conv_packed_forward(x.values(), y, layer);
  for (std::size_t b = 0; b < 8; ++b) {
    EXPECT_EQ(y[b * 4 + 3], 1.0f);
    EXPECT_EQ(y[b * 4 + 0], 0.0f);
  }
  ConvFilters f2(conv_filters_shape(d));
  f2[2] = 1.0f;  // filter = e2
  ConvInput x2(conv_input_shape(d));
  for (std::size_t b = 0; b < 8; ++b) x2[b * 4 + 1] = 1.0f;  // input = e1
  const ConvOutput y2 = conv_reference(x2, ConvLayer(d, sig, f2, ConvBias(conv_bias_shape(d))));
  for (std::size_t b = 0; b < 8; ++b) EXPECT_EQ(y2[b * 4 + 3], -1.0f);
}

TEST(Conv, IdentityFilterReturnsInput) {
  std::mt19937_64 rng(2);
  for (std::size_t k = 1; k <= 3; ++k) {
    const Signature sig = all_signatures(k).back();
    const Dims d = Dims::make(k, 8, 3, 3, 4, 1);
    ConvFilters f(conv_filters_shape(d));
    for (std::size_t c = 0; c < 3; ++c) f[(0 * 3 + c) * 3 + c] = 1.0f;
    ConvInput x(conv_input_shape(d));
    oracle::randomize(x.values(), rng);
    const ConvLayer layer(d, sig, f, ConvBias(conv_bias_shape(d)));
    std::vector<float> y(x.values().size());
    conv_packed_forward(x.values(), y, layer);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], x[i]);
  }
}

TEST(Conv, AllVariantsMatchOracleOnEverySignature) {
  std::mt19937_64 rng(7);
  for (std::size_t k = 1; k <= 3; ++k)
    for (const Signature& sig : all_signatures(k)) {
      const Instance in = random_instance(sig, 8, 2, 2, k == 3 ? 4 : 5, 2, rng);
      const ConvLayer layer(in.dims, sig, in.f, in.bias);
      const std::vector<float> want = oracle_out(in);
      EXPECT_LE(oracle::rel_error(conv_reference(in.x, layer).values(), want), 1e-6) << sig.to_string();
      EXPECT_LE(oracle::rel_error(conv_kernelized(in.x, layer).values(), want), 1e-5) << sig.to_string();
      EXPECT_LE(oracle::rel_error(packed_out(in, KernelParams::defaults()), want), 1e-5) << sig.to_string();
    }
}

TEST(Conv, SpecializedAndInterpretedKernelsAgree) {
  std::mt19937_64 rng(9);
  const Signature sig({1, -1, 0});
  const Instance in = random_instance(sig, 24, 2, 3, 5, 3, rng);
  const std::vector<float> want = oracle_out(in);
  const std::vector<std::pair<KernelParams, KernelPath>> cases{
      {{8, 1}, KernelPath::Specialized}, {{1, 4}, KernelPath::Specialized}, {{8, 3}, KernelPath::Interpreted},
      {{3, 2}, KernelPath::Interpreted}, {{4, 1}, KernelPath::Interpreted}, {{1, 1}, KernelPath::Specialized}};
  for (const auto& [p, path] : cases) {
    const ConvLayer layer(in.dims, sig, in.f, in.bias, p);
    if (p.W == 8 && native_vector_width() != 8) continue;
    EXPECT_EQ(layer.kernel_path(), path) << p.W << "x" << p.U;
    EXPECT_LE(oracle::rel_error(packed_out(in, p), want), 1e-5) << p.W << "x" << p.U;
  }
}

TEST(Conv, ForcedScheduleRunsInterpreted) {
  std::mt19937_64 rng(4);
  const Signature sig({1, 1});
  const Instance in = random_instance(sig, 8, 1, 1, 4, 2, rng);
  const ConvLayer layer(in.dims, sig, in.f, in.bias);
  const ConvLayer same = layer.with_schedule(layer.schedule());
  EXPECT_EQ(same.kernel_path(), KernelPath::Interpreted);
  std::vector<float> y(shape_volume(conv_output_shape(in.dims)));
  conv_packed_forward(in.x.values(), y, same);
  EXPECT_LE(oracle::rel_error(y, oracle_out(in)), 1e-5);
  EXPECT_THROW(layer.with_schedule(build_schedule(Signature({1, -1}))), Error);
}

TEST(Conv, ExpandedKernelStructure) {
  std::mt19937_64 rng(6);
  const Signature sig({1, -1});
  const Instance in = random_instance(sig, 8, 2, 3, 3, 2, rng);
  const ConvLayer layer(in.dims, sig, in.f, in.bias);
  const ExpandedKernel K = build_expanded_kernel(layer);
  const std::size_t NB = 4, Q = 4;
  EXPECT_EQ(K.shape(), (std::vector<std::size_t>{3 * NB, 2 * NB, Q}));
  const auto g = oracle::g_of(sig);
  for (std::size_t co = 0; co < 3; ++co)
    for (std::size_t t = 0; t < NB; ++t)
      for (std::size_t ci = 0; ci < 2; ++ci)
        for (std::size_t j = 0; j < NB; ++j)
          for (std::size_t q = 0; q < Q; ++q) {
            // Output blade t receives filter blade i = t ^ j times input blade j.
            const std::uint32_t i = static_cast<std::uint32_t>(t ^ j);
            const auto [mask, c] = oracle::blade_product(i, static_cast<std::uint32_t>(j), g);
            ASSERT_EQ(mask, t);
            const float want = static_cast<float>(c) * in.f[((i * 2 + ci) * 3 + co) * Q + q];
            ASSERT_EQ(K[((co * NB + t) * 2 * NB + ci * NB + j) * Q + q], want);
          }
}

TEST(Conv, Errors) {
  const Signature sig({1, 1});
  const Dims d = Dims::make(2, 12, 1, 1, 3, 2);
  const ConvFilters f(conv_filters_shape(d));
  const ConvBias b(conv_bias_shape(d));
  EXPECT_THROW(ConvLayer(d, Signature({1}), f, b), Error);
  EXPECT_THROW(ConvLayer(d, sig, ConvFilters(std::vector<std::size_t>{4, 1, 1, 3}), b), Error);
  EXPECT_THROW(ConvLayer(d, sig, f, b, KernelParams{0, 1}), Error);
  EXPECT_THROW(ConvLayer(Dims::make(4, 8, 1, 1, 2, 1), Signature({1, 1, 1, 1}),
                         ConvFilters(conv_filters_shape(Dims::make(4, 8, 1, 1, 2, 1))),
                         ConvBias(conv_bias_shape(Dims::make(4, 8, 1, 1, 2, 1)))),
               Error);
  const ConvLayer layer(d, sig, f, b, KernelParams{8, 1});
  std::vector<float> x(shape_volume(conv_input_shape(d))), y(shape_volume(conv_output_shape(d)));
  try {
    conv_packed_forward(x, y, layer);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BatchNotDivisible);
  }
  std::vector<float> short_y(y.size() - 1);
  EXPECT_THROW(conv_reference_forward(x, short_y, layer), Error);
}

TEST(Conv, VectorWidthEnvironmentOverride) {
  ::setenv("CLIFFKERN_VECTOR_WIDTH", "4", 1);
  EXPECT_EQ(KernelParams::defaults().W, 4u);
  ::setenv("CLIFFKERN_VECTOR_WIDTH", "abc", 1);
  EXPECT_THROW(KernelParams::defaults(), Error);
  ::unsetenv("CLIFFKERN_VECTOR_WIDTH");
  EXPECT_EQ(KernelParams::defaults().W, native_vector_width());
  EXPECT_EQ(KernelParams::defaults().U, 1u);
}

TEST(Conv, FlopModel) {
  const Dims d = Dims::make(2, 8, 3, 5, 6, 3);
  const OpSchedule s = build_schedule(Signature({1, 1}));
  // 16 terms -> 32 flops per multivector product.
  EXPECT_EQ(conv_flops(d, s), 8 * 5 * 16 * (3 * 9 * 32 + 4));
}
