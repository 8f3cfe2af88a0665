#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cliffkern/activation.hpp"
#include "cliffkern/error.hpp"
#include "oracles.hpp"

using namespace cliffkern;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::ConfigInvalid;
}

/// Gate oracle in long double straight from the definition.
std::vector<float> oracle_out(const ActivationTensor& x, const ActivationConfig& cfg) {
  const std::size_t B = x.shape()[0], C = x.shape()[1], NB = x.shape()[2], K = cfg.K();
  std::vector<float> out(x.values().size());
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = 0; c < C; ++c) {
      const float* xc = x.data() + (b * C + c) * NB;
      long double s = 0.0L;
      for (std::size_t k = 0; k < K; ++k) {
        const long double v = xc[cfg.kernel_indices()[k]];
        s += cfg.mode() == AggMode::Linear ? v * cfg.weight()[c * K + k] : v;
      }
      if (cfg.mode() == AggMode::Linear) s += cfg.bias()[c];
      if (cfg.mode() == AggMode::Mean) s /= static_cast<long double>(K);
      const long double gate = oracle::sigmoid(s);
      for (std::size_t j = 0; j < NB; ++j) out[(b * C + c) * NB + j] = static_cast<float>(xc[j] * gate);
    }
  return out;
}

ActivationConfig make_cfg(const Signature& sig, AggMode mode, std::vector<std::size_t> idx, std::size_t C,
                          std::mt19937_64& rng) {
  if (mode != AggMode::Linear) return ActivationConfig(sig, mode, std::move(idx));
  std::vector<float> w(C * idx.size()), b(C);
  oracle::randomize(w, rng);
  oracle::randomize(b, rng);
  return ActivationConfig(sig, mode, std::move(idx), w, b);
}

}  // namespace

TEST(Sigmoid, VectorizedAgainstExtendedPrecision) {
  std::vector<float> s;
  for (int i = -300000; i <= 300000; ++i) s.push_back(static_cast<float>(i) * 1e-4f);
  std::vector<float> v(s.size());
  sigmoid_vectorized(s, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(v[i] - oracle::sigmoid(s[i]))));
    EXPECT_NEAR(sigmoid(s[i]), static_cast<double>(oracle::sigmoid(s[i])), 1e-6);
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Sigmoid, SaturatesMonotonically) {
  std::vector<float> s{-1e30f, -1000.f, -100.f, -88.f, -50.f, 0.f, 50.f, 88.f, 100.f, 1000.f, 1e30f};
  std::vector<float> v(s.size());
  sigmoid_vectorized(s, v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_TRUE(std::isfinite(v[i]));
    EXPECT_GE(v[i], 0.0f);
    EXPECT_LE(v[i], 1.0f);
    if (i) EXPECT_LE(v[i - 1], v[i]);
  }
  EXPECT_EQ(v.back(), 1.0f);
  EXPECT_NEAR(v.front(), 0.0f, 1e-30);
  EXPECT_FLOAT_EQ(v[5], 0.5f);
  std::vector<float> odd(5, 0.0f), out(4);
  EXPECT_THROW(sigmoid_vectorized(odd, out), Error);
}

TEST(Activation, FrozenSumGate) {
  // One multivector (1, 2) summed over both blades: gate = sigmoid(3).
  const ActivationConfig cfg(Signature({1}), AggMode::Sum, {0, 1});
  const float xv[] = {1.0f, 2.0f};
  const ActivationTensor y = activation_reference(ActivationTensor(activation_shape(1, 1, 2), xv), cfg);
  EXPECT_NEAR(y[0], 0.9525741268f, 1e-7);
  EXPECT_NEAR(y[1], 1.9051482536f, 1e-7);
}

TEST(Activation, LadderMatchesOracle) {
  std::mt19937_64 rng(31);
  for (std::size_t k = 1; k <= 3; ++k) {
    const Signature sig = all_signatures(k).back();
    const std::size_t NB = sig.n_blades();
    for (AggMode mode : {AggMode::Linear, AggMode::Sum, AggMode::Mean})
      for (std::size_t K : {std::size_t{1}, NB / 2, NB})
        for (std::size_t C : {std::size_t{1}, std::size_t{7}, std::size_t{8}, std::size_t{19}, std::size_t{24}}) {
          ActivationTensor x(activation_shape(4, C, NB));
          oracle::randomize(x.values(), rng, -5.0f, 5.0f);
          std::vector<std::size_t> idx(NB);
          for (std::size_t i = 0; i < NB; ++i) idx[i] = NB - 1 - i;
          if (mode == AggMode::Linear && K == NB) {
            for (std::size_t i = 0; i < NB; ++i) idx[i] = i;
          }
          idx.resize(K);
          const ActivationConfig cfg = make_cfg(sig, mode, idx, C, rng);
          const std::vector<float> want = oracle_out(x, cfg);
          const VPack vp = gather_vpack(x, cfg);
          EXPECT_LE(oracle::abs_error(activation_reference(x, cfg).values(), want), 1e-5);
          EXPECT_LE(oracle::abs_error(activation_hoisted(x, cfg).values(), want), 1e-5);
          EXPECT_LE(oracle::abs_error(activation_gathered(x, vp, cfg).values(), want), 1e-5);
          EXPECT_LE(oracle::abs_error(activation_packed(x, vp, cfg).values(), want), 1e-5);
          if (specialization_applies(C, cfg)) {
            EXPECT_LE(oracle::abs_error(activation_specialized(x, cfg).values(), want), 1e-5);
            EXPECT_LE(oracle::abs_error(activation_specialized_looped(x, cfg).values(), want), 1e-5);
          }
        }
  }
}

TEST(Activation, GatherVPack) {
  const ActivationConfig cfg(Signature({1, 1}), AggMode::Sum, {3, 0});
  ActivationTensor x(activation_shape(2, 3, 4));
  for (std::size_t i = 0; i < x.values().size(); ++i) x[i] = static_cast<float>(i);
  const VPack vp = gather_vpack(x, cfg);
  EXPECT_EQ(vp.shape(), (std::vector<std::size_t>{2, 3, 2}));
  for (std::size_t bc = 0; bc < 6; ++bc) {
    EXPECT_EQ(vp[bc * 2], x[bc * 4 + 3]);
    EXPECT_EQ(vp[bc * 2 + 1], x[bc * 4]);
  }
}

TEST(Activation, SpecializationPreconditions) {
  const Signature s3({1, 1, 1});
  std::vector<std::size_t> ident{0, 1, 2, 3, 4, 5, 6, 7}, rev{7, 6, 5, 4, 3, 2, 1, 0};
  std::vector<float> w(16 * 8, 0.5f), b(16, 0.0f);
  EXPECT_TRUE(specialization_applies(16, ActivationConfig(s3, AggMode::Mean, ident)));
  EXPECT_TRUE(specialization_applies(16, ActivationConfig(s3, AggMode::Sum, rev)));
  EXPECT_FALSE(specialization_applies(12, ActivationConfig(s3, AggMode::Mean, ident)));
  EXPECT_FALSE(specialization_applies(16, ActivationConfig(s3, AggMode::Mean, {0, 1, 2, 3})));
  EXPECT_FALSE(specialization_applies(16, ActivationConfig(s3, AggMode::Linear, rev, w, b)));
  EXPECT_FALSE(specialization_applies(16, ActivationConfig(Signature({1}), AggMode::Sum, {0, 1})));

  ActivationTensor x(activation_shape(2, 12, 8));
  EXPECT_EQ(code_of([&] { activation_specialized(x, ActivationConfig(s3, AggMode::Mean, ident)); }),
            Errc::SpecializationPreconditionViolated);
  ActivationTensor x16(activation_shape(2, 16, 8));
  EXPECT_EQ(code_of([&] { activation_specialized_looped(x16, ActivationConfig(s3, AggMode::Linear, rev, w, b)); }),
            Errc::SpecializationPreconditionViolated);
}

TEST(Activation, ConfigErrors) {
  const Signature s2({1, -1});
  EXPECT_EQ(code_of([&] { ActivationConfig(s2, AggMode::Sum, {4}); }), Errc::IndexOutOfRange);
  EXPECT_EQ(code_of([&] { ActivationConfig(s2, AggMode::Sum, {}); }), Errc::ConfigInvalid);
  EXPECT_EQ(code_of([&] { ActivationConfig(s2, AggMode::Sum, {1, 1}); }), Errc::ConfigInvalid);
  EXPECT_EQ(code_of([&] { ActivationConfig(s2, AggMode::Linear, {0}); }), Errc::ModeConfigMismatch);
  EXPECT_EQ(code_of([&] { ActivationConfig(s2, AggMode::Mean, {0}, std::vector<float>{1}, std::vector<float>{1}); }),
            Errc::ModeConfigMismatch);
  EXPECT_EQ(code_of([&] { ActivationConfig(s2, AggMode::Linear, {0, 1}, std::vector<float>(5), std::vector<float>(3)); }),
            Errc::ModeConfigMismatch);
  const ActivationConfig lin(s2, AggMode::Linear, {0}, std::vector<float>(3), std::vector<float>(3));
  EXPECT_EQ(code_of([&] { activation_reference(ActivationTensor(activation_shape(1, 4, 4)), lin); }),
            Errc::ShapeMismatch);
  EXPECT_EQ(code_of([&] { activation_reference(ActivationTensor(activation_shape(1, 3, 8)), lin); }),
            Errc::ShapeMismatch);
  EXPECT_EQ(parse_agg_mode("Mean"), AggMode::Mean);
  EXPECT_EQ(parse_agg_mode("0"), AggMode::Linear);
  EXPECT_EQ(code_of([] { parse_agg_mode("max"); }), Errc::ConfigInvalid);
}

TEST(Activation, GateInputsAndFlops) {
  const ActivationConfig cfg(Signature({1}), AggMode::Mean, {0, 1});
  const float xv[] = {1.0f, 3.0f, -2.0f, 0.0f};
  const auto s = activation_gate_inputs(ActivationTensor(activation_shape(2, 1, 2), xv), cfg);
  EXPECT_EQ(s, (std::vector<float>{2.0f, -1.0f}));
  EXPECT_EQ(activation_flops(2, 3, 8, 8, AggMode::Linear), 6 * (16 + 1 + kSigmoidFlops + 8));
  EXPECT_EQ(activation_flops(2, 3, 8, 4, AggMode::Sum), 6 * (3 + kSigmoidFlops + 8));
  EXPECT_EQ(activation_flops(2, 3, 8, 4, AggMode::Mean), 6 * (4 + kSigmoidFlops + 8));
}
