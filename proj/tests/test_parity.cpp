#include <gtest/gtest.h>

#include "cliffkern/parity.hpp"

using namespace cliffkern;

TEST(Parity, DefaultRunPasses) {
  const ParityReport r = parity_report();
  EXPECT_TRUE(r.all_pass()) << r.to_text();
  EXPECT_GE(r.entries.size(), 10u);
  for (const auto& e : r.entries) EXPECT_GT(e.cases, 0u) << e.suite << " " << e.pair;
  const std::string text = r.to_text();
  EXPECT_NE(text.find("PASS: "), std::string::npos);
}

TEST(Parity, DetectsCorruptedSchedule) {
  ParityOptions opts;
  opts.corrupt_schedule = corrupt_first_term;
  const ParityReport r = parity_report(opts);
  EXPECT_FALSE(r.all_pass());
  bool schedule_failed = false, conv_failed = false, linear_failed = false;
  for (const auto& e : r.entries) {
    if (e.pass()) continue;
    schedule_failed |= e.suite == "schedule";
    conv_failed |= e.suite.rfind("conv", 0) == 0;
    linear_failed |= e.suite == "linear";
  }
  EXPECT_TRUE(schedule_failed);
  EXPECT_TRUE(conv_failed);
  EXPECT_TRUE(linear_failed);
  EXPECT_NE(r.to_text().find("FAIL: "), std::string::npos);
}

TEST(Parity, DeterministicForSeed) {
  ParityOptions opts;
  opts.seed = 9;
  EXPECT_EQ(parity_report(opts).to_text(), parity_report(opts).to_text());
}

TEST(Parity, CorruptFirstTermFlipsSign) {
  const OpSchedule s = build_schedule(Signature({1, -1}));
  const OpSchedule c = corrupt_first_term(s);
  ASSERT_EQ(c.terms().size(), s.terms().size());
  EXPECT_NE(c.terms()[0].negate, s.terms()[0].negate);
  for (std::size_t i = 1; i < s.terms().size(); ++i) EXPECT_EQ(c.terms()[i].negate, s.terms()[i].negate);
}
