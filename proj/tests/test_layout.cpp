#include <gtest/gtest.h>

#include <random>

#include "cliffkern/error.hpp"
#include "cliffkern/layout.hpp"
#include "oracles.hpp"

using namespace cliffkern;

TEST(Dims, Validation) {
  EXPECT_THROW(Dims::make(2, 8, 1, 1, 3, 4), Error);
  EXPECT_THROW(Dims::make(2, 0, 1, 1, 3, 3), Error);
  const Dims d = Dims::make(3, 8, 2, 3, 5, 2);
  EXPECT_EQ(d.n_blades(), 8u);
  EXPECT_EQ(d.d_out(), 4u);
  EXPECT_EQ(d.image_positions(), 125u);
  EXPECT_EQ(d.filter_positions(), 8u);
  EXPECT_EQ(d.out_positions(), 64u);
}

TEST(Layout, Shapes) {
  const Dims d = Dims::make(2, 16, 3, 5, 6, 3);
  EXPECT_EQ(conv_input_shape(d), (std::vector<std::size_t>{16, 3, 36, 4}));
  EXPECT_EQ(conv_output_shape(d), (std::vector<std::size_t>{16, 5, 16, 4}));
  EXPECT_EQ(conv_filters_shape(d), (std::vector<std::size_t>{4, 3, 5, 9}));
  EXPECT_EQ(conv_bias_shape(d), (std::vector<std::size_t>{4, 5}));
  EXPECT_EQ(packed_input_shape(d, 8), (std::vector<std::size_t>{3, 36, 2, 4, 8}));
  EXPECT_EQ(packed_output_shape(d, 8), (std::vector<std::size_t>{5, 16, 2, 4, 8}));
  EXPECT_EQ(packed_filters_shape(d), (std::vector<std::size_t>{3, 5, 9, 4}));
  try {
    packed_input_shape(d, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BatchNotDivisible);
  }
}

TEST(Layout, SpatialOffsetsRowMajor) {
  EXPECT_EQ(spatial_offsets(2, 2, 5), (std::vector<std::size_t>{0, 1, 5, 6}));
  EXPECT_EQ(spatial_offsets(3, 2, 3), (std::vector<std::size_t>{0, 1, 3, 4, 9, 10, 12, 13}));
  EXPECT_EQ(spatial_offsets(1, 3, 7), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Layout, PackInputIndexFormula) {
  const Dims d = Dims::make(2, 16, 2, 1, 3, 1);
  ConvInput x(conv_input_shape(d));
  for (std::size_t i = 0; i < x.values().size(); ++i) x[i] = static_cast<float>(i);
  for (std::size_t L : {std::size_t{1}, std::size_t{4}, std::size_t{8}, std::size_t{16}}) {
    const PackedInput xp = pack_input(x, d, L);
    const std::size_t P = d.image_positions(), NB = d.n_blades();
    for (std::size_t b = 0; b < d.B; ++b)
      for (std::size_t c = 0; c < d.C_in; ++c)
        for (std::size_t p = 0; p < P; ++p)
          for (std::size_t t = 0; t < NB; ++t) {
            const std::size_t packed = (((c * P + p) * (d.B / L) + b / L) * NB + t) * L + b % L;
            ASSERT_EQ(xp[packed], x[((b * d.C_in + c) * P + p) * NB + t]);
          }
    EXPECT_EQ(unpack_input(xp, d, L).values().size(), x.values().size());
    const ConvInput back = unpack_input(xp, d, L);
    EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), x.values().begin()));
  }
}

TEST(Layout, FiltersAndOutputRoundTrip) {
  std::mt19937_64 rng(3);
  const Dims d = Dims::make(3, 8, 2, 3, 4, 2);
  ConvFilters f(conv_filters_shape(d));
  oracle::randomize(f.values(), rng);
  const PackedFilters fp = pack_filters(f, d);
  const std::size_t Q = d.filter_positions(), NB = d.n_blades();
  for (std::size_t t = 0; t < NB; ++t)
    for (std::size_t ci = 0; ci < d.C_in; ++ci)
      for (std::size_t co = 0; co < d.C_out; ++co)
        for (std::size_t q = 0; q < Q; ++q)
          ASSERT_EQ(fp[((ci * d.C_out + co) * Q + q) * NB + t], f[((t * d.C_in + ci) * d.C_out + co) * Q + q]);
  const ConvFilters fb = unpack_filters(fp, d);
  EXPECT_TRUE(std::equal(fb.values().begin(), fb.values().end(), f.values().begin()));

  ConvOutput y(conv_output_shape(d));
  oracle::randomize(y.values(), rng);
  const ConvOutput yb = unpack_output(pack_output(y, d, 8), d, 8);
  EXPECT_TRUE(std::equal(yb.values().begin(), yb.values().end(), y.values().begin()));
}

TEST(Layout, RejectsWrongShapes) {
  const Dims d = Dims::make(1, 8, 2, 2, 4, 2);
  ConvInput wrong(std::vector<std::size_t>{8, 2, 5, 2});
  EXPECT_THROW(pack_input(wrong, d, 8), Error);
  ConvInput x(conv_input_shape(d));
  EXPECT_THROW(pack_input(x, d, 3), Error);
  const std::vector<float> three(3);
  EXPECT_THROW(ConvBias(conv_bias_shape(d), three), Error);
}

TEST(Layout, ZeroPadBatch) {
  const Dims d = Dims::make(1, 5, 1, 1, 2, 1);
  ConvInput x(conv_input_shape(d));
  for (std::size_t i = 0; i < x.values().size(); ++i) x[i] = static_cast<float>(i + 1);
  Dims padded;
  const ConvInput xp = zero_pad_batch(x, d, 8, padded);
  EXPECT_EQ(padded.B, 8u);
  EXPECT_EQ(xp.shape(), conv_input_shape(padded));
  for (std::size_t i = 0; i < xp.values().size(); ++i) {
    EXPECT_EQ(xp[i], i < x.values().size() ? x[i] : 0.0f);
  }
}
