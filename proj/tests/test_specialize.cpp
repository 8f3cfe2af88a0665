#include <gtest/gtest.h>

#include <random>

#include "cliffkern/error.hpp"
#include "cliffkern/specialize.hpp"
#include "oracles.hpp"

using namespace cliffkern;

TEST(Schedule, FrozenTextOneGenerator) {
  EXPECT_EQ(build_schedule(Signature({-1})).to_text(),
            "out[0] += a[0]*b[0]\n"
            "out[0] -= a[1]*b[1]\n"
            "out[1] += a[0]*b[1]\n"
            "out[1] += a[1]*b[0]\n");
  EXPECT_THROW(build_schedule(Signature({0})), Error);
}

TEST(Schedule, FrozenTextDegenerateGenerator) {
  // Cl(0,1): e1^2 = 0 drops every term where both operands contain e1.
  EXPECT_EQ(build_schedule(Signature({0, 1})).to_text(),
            "out[0] += a[0]*b[0]\n"
            "out[0] += a[2]*b[2]\n"
            "out[1] += a[0]*b[1]\n"
            "out[1] += a[1]*b[0]\n"
            "out[1] -= a[2]*b[3]\n"
            "out[1] += a[3]*b[2]\n"
            "out[2] += a[0]*b[2]\n"
            "out[2] += a[2]*b[0]\n"
            "out[3] += a[0]*b[3]\n"
            "out[3] += a[1]*b[2]\n"
            "out[3] -= a[2]*b[1]\n"
            "out[3] += a[3]*b[0]\n");
}

TEST(Schedule, TermCountAndOrdering) {
  for (std::size_t k = 1; k <= 3; ++k)
    for (const Signature& sig : all_signatures(k)) {
      const OpSchedule s = build_schedule(sig);
      const std::size_t n = sig.n_blades();
      if (sig.has_zero()) {
        EXPECT_LT(s.size(), n * n) << sig.to_string();
      } else {
        EXPECT_EQ(s.size(), n * n) << sig.to_string();
      }
      EXPECT_EQ(schedule_flop_count(s), static_cast<std::int64_t>(2 * s.size()));
      for (std::size_t i = 1; i < s.size(); ++i) {
        const FmaTerm& p = s.terms()[i - 1];
        const FmaTerm& c = s.terms()[i];
        EXPECT_TRUE(p.out_blade < c.out_blade || (p.out_blade == c.out_blade && p.a_blade < c.a_blade));
      }
    }
}

TEST(Schedule, TermsMatchOracleProducts) {
  for (std::size_t k = 1; k <= 3; ++k)
    for (const Signature& sig : all_signatures(k)) {
      const auto g = oracle::g_of(sig);
      const OpSchedule s = build_schedule(sig);
      for (const FmaTerm& t : s.terms()) {
        const auto [mask, coeff] = oracle::blade_product(t.a_blade.mask, t.b_blade.mask, g);
        EXPECT_EQ(mask, t.out_blade.mask);
        EXPECT_EQ(coeff, t.negate ? -1 : 1);
      }
    }
}

TEST(Schedule, CompileTimeTermsEqualRuntimeTerms) {
  for (std::size_t k = 1; k <= 3; ++k)
    for (const Signature& sig : all_signatures(k)) {
      EXPECT_EQ(static_schedule_terms(sig), build_schedule(sig).terms()) << sig.to_string();
    }
  EXPECT_TRUE(static_schedule_terms(Signature({1, 1, 1, 1})).empty());
}

TEST(Schedule, ApplyMatchesProduct) {
  std::mt19937_64 rng(5);
  for (std::size_t k = 1; k <= 3; ++k)
    for (const Signature& sig : all_signatures(k)) {
      const OpSchedule s = build_schedule(sig);
      const BladeProductTable t(sig);
      for (int i = 0; i < 25; ++i) {
        Multivector a(sig.n_blades()), b(sig.n_blades());
        oracle::randomize(a.blades(), rng);
        oracle::randomize(b.blades(), rng);
        EXPECT_LE(oracle::rel_error(apply_schedule(s, a, b).blades(), geometric_product(a, b, t).blades()), 1e-6);
      }
    }
}

TEST(Schedule, RejectsOutOfRangeBlades) {
  EXPECT_THROW(OpSchedule(Signature({1}), {FmaTerm{BladeIndex{2}, BladeIndex{0}, BladeIndex{0}, false}}), Error);
  const OpSchedule s = build_schedule(Signature({1}));
  EXPECT_THROW(apply_schedule(s, Multivector{1, 2, 3, 4}, Multivector{1, 2}), Error);
}
