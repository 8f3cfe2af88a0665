// cliffbench: parameter sweeps, the parity suite and SVG plotting.
//
//   cliffbench bench --kind conv2d --C 4,8,16 --B 8 --dimage 24 --dfilter 5 --verify --csv out.csv
//   cliffbench parity --seed 7
//   cliffbench plot --csv out.csv --plot out.svg --axis C

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cliffkern/bench.hpp"
#include "cliffkern/parity.hpp"

namespace ck = cliffkern;

namespace {

constexpr int kExitError = 1;
constexpr int kExitVerification = 2;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ck::Error(ck::Errc::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw ck::Error(ck::Errc::IoError, "write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ck::Error(ck::Errc::IoError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* verification_text(ck::Verification v) {
  switch (v) {
    case ck::Verification::Passed: return "ok";
    case ck::Verification::Skipped: return "skipped";
    case ck::Verification::NotRequested: break;
  }
  return "-";
}

void print_table(const std::vector<ck::BenchRecord>& records) {
  std::printf("%-20s %-18s %4s %5s %5s %5s %4s %4s %3s %3s %12s %12s %10s %8s\n", "kind", "variant", "B", "C_in",
              "C_out", "d_img", "d_f", "W", "U", "", "median_s", "GFLOP/s", "verify", "max_err");
  for (const auto& r : records) {
    std::printf("%-20s %-18s %4zu %5zu %5zu %5zu %4zu %4zu %3zu %3s %12.6g %12.4f %10s %8.2g\n", r.kind.c_str(),
                r.variant.c_str(), r.B, r.C_in, r.C_out, r.d_image, r.d_filter, r.W, r.U, r.unstable ? "!" : "",
                r.median_s, r.flops_per_s / 1e9, verification_text(r.verification), r.max_error);
    if (r.flops_per_cycle) std::printf("%-20s flops/cycle %.3f\n", "", *r.flops_per_cycle);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clifford layer kernels: benchmarks, parity suite and plots"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "Time a parameter sweep");
  ck::BenchConfig cfg;
  std::string kind = "conv2d", sig_text, mode_text = "mean", timer_text = "wall", csv_path, plot_path, axis = "C";
  bench->add_option("--kind", kind, "conv1d | conv2d | conv3d | linear | activation")->capture_default_str();
  bench->add_option("--k", cfg.k, "Algebra dimension for linear and activation")->capture_default_str();
  bench->add_option("--sig", sig_text, "Signature as a comma list, e.g. 1,1,-1 (default all +1)");
  bench->add_option("--B", cfg.B, "Batch sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--Cin", cfg.C_in, "Input channel counts (activation: channel counts)")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--Cout", cfg.C_out, "Output channel counts")->delimiter(',')->capture_default_str();
  bench->add_option("--C", cfg.C, "Channel counts with C_in = C_out (overrides --Cin/--Cout)")->delimiter(',');
  bench->add_option("--dimage", cfg.d_image, "Image side lengths")->delimiter(',')->capture_default_str();
  bench->add_option("--dfilter", cfg.d_filter, "Filter side lengths")->delimiter(',')->capture_default_str();
  bench->add_option("--variants", cfg.variants, "Variants to run (default: all for the kind)")->delimiter(',');
  bench->add_option("--W", cfg.W, "Vector widths for packed conv (default: build width)")->delimiter(',');
  bench->add_option("--U", cfg.U, "Unroll factors for packed conv")->delimiter(',')->capture_default_str();
  bench->add_option("--reps", cfg.repetitions, "Timed repetitions (>= 3)")->capture_default_str();
  bench->add_option("--warmup", cfg.warmup, "Untimed warm-up runs")->capture_default_str();
  bench->add_flag("--verify", cfg.verify, "Check each variant against the reference before timing");
  bench->add_option("--verify-max-elements", cfg.verify_max_elements, "Skip verification above this output size")
      ->capture_default_str();
  bench->add_option("--mode", mode_text, "Activation aggregation: linear | sum | mean")->capture_default_str();
  bench->add_option("--K", cfg.K, "Activation kernel blade counts (0 = N_B)")->delimiter(',')->capture_default_str();
  bench->add_option("--timer", timer_text, "wall | cycles")->capture_default_str();
  bench->add_option("--seed", cfg.seed, "Input seed")->capture_default_str();
  bench->add_option("--csv", csv_path, "Write records as CSV");
  bench->add_option("--plot", plot_path, "Write an SVG throughput chart");
  bench->add_option("--axis", axis, "Plot x axis")->capture_default_str();

  // parity
  auto* parity = app.add_subcommand("parity", "Cross-variant equivalence suite over all signatures k <= 3");
  std::uint64_t parity_seed = 1;
  bool corrupt = false;
  parity->add_option("--seed", parity_seed, "Instance seed")->capture_default_str();
  parity->add_flag("--corrupt-schedule", corrupt, "Fault injection: run every layer with a broken schedule");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a CSV produced by `bench --csv` as SVG");
  std::string plot_in, plot_out, plot_axis = "C", plot_title;
  std::vector<std::string> caches;
  bool log_x = false;
  plot->add_option("--csv", plot_in, "Input CSV")->required();
  plot->add_option("--plot", plot_out, "Output SVG")->required();
  plot->add_option("--axis", plot_axis, "C | C_out | B | d_image | d_filter | W | U | bytes")->capture_default_str();
  plot->add_option("--title", plot_title, "Chart title");
  plot->add_option("--cache", caches, "Cache marker NAME=BYTES on the bytes axis (repeatable)");
  plot->add_flag("--log-x", log_x, "Logarithmic x axis");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      cfg.kind = ck::parse_layer_kind(kind);
      if (!sig_text.empty()) cfg.signature = ck::parse_signature(sig_text);
      cfg.mode = ck::parse_agg_mode(mode_text);
      cfg.timer = ck::parse_timer_kind(timer_text);
      const auto records = ck::run_sweep(cfg);
      print_table(records);
      for (const auto& r : records) {
        if (r.unstable) {
          std::fprintf(stderr, "warning: %s/%s median/min = %.2f > 1.2; timing is noisy\n", r.kind.c_str(),
                       r.variant.c_str(), r.median_s / r.min_s);
        }
      }
      if (!csv_path.empty()) write_file(csv_path, ck::emit_csv(records));
      if (!plot_path.empty()) {
        ck::PlotSpec spec;
        spec.axis = axis;
        write_file(plot_path, ck::emit_plot(records, spec));
      }
      return 0;
    }
    if (*parity) {
      ck::ParityOptions opts;
      opts.seed = parity_seed;
      if (corrupt) opts.corrupt_schedule = ck::corrupt_first_term;
      const ck::ParityReport report = ck::parity_report(opts);
      std::fputs(report.to_text().c_str(), stdout);
      return report.all_pass() ? 0 : kExitVerification;
    }
    if (*plot) {
      ck::PlotSpec spec;
      spec.axis = plot_axis;
      spec.title = plot_title;
      spec.log_x = log_x;
      for (const std::string& c : caches) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) throw ck::Error(ck::Errc::ConfigInvalid, "--cache expects NAME=BYTES");
        spec.cache_sizes.emplace_back(c.substr(0, eq), std::stod(c.substr(eq + 1)));
      }
      write_file(plot_out, ck::emit_plot(ck::parse_csv(read_file(plot_in)), spec));
      return 0;
    }
  } catch (const ck::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ck::Errc::VerificationFailed ? kExitVerification : kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
