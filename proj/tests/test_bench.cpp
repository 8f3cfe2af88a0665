#include <gtest/gtest.h>

#include "cliffkern/bench.hpp"
#include "cliffkern/error.hpp"

using namespace cliffkern;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoError;
}

BenchRecord sample(std::string variant, std::size_t C) {
  BenchRecord r;
  r.kind = "conv2d";
  r.variant = std::move(variant);
  r.k = 2;
  r.B = 8;
  r.C_in = r.C_out = C;
  r.d_image = 12;
  r.d_filter = 3;
  r.W = 8;
  r.U = 2;
  r.flops = 123456789012;
  r.median_s = 0.1 + 1e-17 * static_cast<double>(C);
  r.min_s = 1.0 / 3.0;
  r.flops_per_s = 2.718281828459045e9;
  r.bytes = 1u << 20;
  return r;
}

BenchConfig small(LayerKind kind) {
  BenchConfig cfg;
  cfg.kind = kind;
  cfg.repetitions = 3;
  cfg.warmup = 0;
  cfg.d_image = {6};
  cfg.d_filter = {3};
  return cfg;
}

}  // namespace

TEST(BenchCsv, RoundTripIsExact) {
  const std::vector<BenchRecord> in{sample("packed", 4), sample("reference", 16)};
  const std::string text = emit_csv(in);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  const std::vector<BenchRecord> out = parse_csv(text);
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(out[i].kind, in[i].kind);
    EXPECT_EQ(out[i].variant, in[i].variant);
    EXPECT_EQ(out[i].C_in, in[i].C_in);
    EXPECT_EQ(out[i].W, in[i].W);
    EXPECT_EQ(out[i].flops, in[i].flops);
    EXPECT_EQ(out[i].median_s, in[i].median_s);
    EXPECT_EQ(out[i].min_s, in[i].min_s);
    EXPECT_EQ(out[i].flops_per_s, in[i].flops_per_s);
    EXPECT_EQ(out[i].bytes, in[i].bytes);
  }
  EXPECT_EQ(emit_csv(out), text);
}

TEST(BenchCsv, OneRecordIsTwoLines) {
  const std::string text = emit_csv({sample("packed", 4)});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(emit_csv({}), std::string(kCsvHeader) + "\n");
}

TEST(BenchCsv, MalformedInput) {
  EXPECT_EQ(code_of([] { parse_csv(""); }), Errc::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_csv("kind,variant\n"); }), Errc::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_csv(std::string(kCsvHeader) + "\nconv2d,packed,2\n"); }), Errc::ConfigInvalid);
  std::string bad = emit_csv({sample("packed", 4)});
  bad.replace(bad.find(",8,4,4,"), 7, ",x,4,4,");
  EXPECT_EQ(code_of([&] { parse_csv(bad); }), Errc::ConfigInvalid);
}

TEST(BenchPlot, SvgWithOneSeriesPerVariant) {
  const std::string svg = emit_plot({sample("packed", 4), sample("packed", 8), sample("reference", 4)});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("packed W8 U2"), std::string::npos);
  EXPECT_NE(svg.find("GFLOP/s"), std::string::npos);
  std::size_t lines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
}

TEST(BenchPlot, CacheMarkersOnlyOnBytesAxis) {
  auto a = sample("packed", 4), b = sample("packed", 8);
  b.bytes = 1u << 24;
  PlotSpec spec;
  spec.cache_sizes = {{"L2", 2.0 * (1u << 20)}};
  EXPECT_EQ(emit_plot({a, b}, spec).find(">L2<"), std::string::npos);
  spec.axis = "bytes";
  spec.log_x = true;
  EXPECT_NE(emit_plot({a, b}, spec).find(">L2<"), std::string::npos);
}

TEST(BenchPlot, Errors) {
  EXPECT_EQ(code_of([] { emit_plot({}); }), Errc::AxisMismatch);
  auto other = sample("packed", 8);
  other.kind = "conv3d";
  EXPECT_EQ(code_of([&] { emit_plot({sample("packed", 4), other}); }), Errc::AxisMismatch);
  PlotSpec spec;
  spec.axis = "latency";
  EXPECT_EQ(code_of([&] { emit_plot({sample("packed", 4)}, spec); }), Errc::AxisMismatch);
  auto twin = sample("packed", 4);
  twin.B = 16;
  EXPECT_EQ(code_of([&] { emit_plot({sample("packed", 4), twin}); }), Errc::AxisMismatch);
}

TEST(BenchSweep, SinglePoint) {
  BenchConfig cfg = small(LayerKind::Conv1d);
  cfg.variants = {"packed"};
  const auto records = run_sweep(cfg);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].kind, "conv1d");
  EXPECT_GT(records[0].median_s, 0.0);
  EXPECT_LE(records[0].min_s, records[0].median_s);
  EXPECT_GT(records[0].flops, 0);
  EXPECT_GT(records[0].bytes, 0u);
  EXPECT_EQ(records[0].verification, Verification::NotRequested);
}

TEST(BenchSweep, VerifiedConvSweep) {
  BenchConfig cfg = small(LayerKind::Conv2d);
  cfg.C = {4, 8, 16};
  cfg.verify = true;
  const auto records = run_sweep(cfg);
  EXPECT_EQ(records.size(), 3 * default_variants(LayerKind::Conv2d).size());
  for (const auto& r : records) {
    EXPECT_EQ(r.verification, Verification::Passed) << r.variant << " C=" << r.C_in;
    EXPECT_LE(r.max_error, 1e-4);
  }
}

TEST(BenchSweep, PackedSweepsWidthAndUnroll) {
  BenchConfig cfg = small(LayerKind::Conv1d);
  cfg.B = {16};
  cfg.W = {1, 8};
  cfg.U = {1, 2};
  cfg.variants = {"packed_kernel"};
  cfg.verify = true;
  const auto records = run_sweep(cfg);
  ASSERT_EQ(records.size(), 4u);
  for (const auto& r : records) {
    EXPECT_EQ(r.verification, Verification::Passed);
    EXPECT_TRUE(r.W == 1 || r.W == 8);
    EXPECT_TRUE(r.U == 1 || r.U == 2);
  }
}

TEST(BenchSweep, LinearAndActivation) {
  BenchConfig lin = small(LayerKind::Linear);
  lin.k = 3;
  lin.verify = true;
  for (const auto& r : run_sweep(lin)) EXPECT_EQ(r.verification, Verification::Passed) << r.variant;

  BenchConfig act = small(LayerKind::Activation);
  act.k = 3;
  act.C_in = {16};
  act.K = {0, 4};
  act.verify = true;
  const auto records = run_sweep(act);
  bool saw_specialized = false;
  for (const auto& r : records) {
    EXPECT_EQ(r.verification, Verification::Passed) << r.variant;
    EXPECT_TRUE(r.kind == "activation_mean_K8" || r.kind == "activation_mean_K4") << r.kind;
    if (r.variant == "specialized") {
      saw_specialized = true;
      EXPECT_EQ(r.kind, "activation_mean_K8");
    }
  }
  EXPECT_TRUE(saw_specialized);

  act.K = {4};
  act.variants = {"specialized"};
  EXPECT_EQ(code_of([&] { run_sweep(act); }), Errc::ConfigInvalid);
}

TEST(BenchSweep, ConfigErrors) {
  BenchConfig cfg = small(LayerKind::Conv2d);
  cfg.repetitions = 2;
  EXPECT_EQ(code_of([&] { run_sweep(cfg); }), Errc::ConfigInvalid);
  cfg = small(LayerKind::Conv2d);
  cfg.B = {};
  EXPECT_EQ(code_of([&] { run_sweep(cfg); }), Errc::ConfigInvalid);
  cfg = small(LayerKind::Conv2d);
  cfg.variants = {"fastest"};
  EXPECT_EQ(code_of([&] { run_sweep(cfg); }), Errc::ConfigInvalid);
  cfg = small(LayerKind::Conv2d);
  cfg.B = {12};
  cfg.variants = {"packed"};
  EXPECT_EQ(code_of([&] { run_sweep(cfg); }), Errc::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_layer_kind("conv4d"); }), Errc::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_timer_kind("sundial"); }), Errc::ConfigInvalid);
}

TEST(BenchModel, LocalOperationIntensity) {
  EXPECT_DOUBLE_EQ(local_operation_intensity(4, 1), 32.0 / 9.0);
  EXPECT_DOUBLE_EQ(local_operation_intensity(8, 4), 64.0 / 8.25);
  EXPECT_LT(local_operation_intensity(8, 1), local_operation_intensity(8, 2));
}
