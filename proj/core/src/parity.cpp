#include "cliffkern/parity.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>

#include "cliffkern/activation.hpp"
#include "cliffkern/conv.hpp"
#include "cliffkern/linear.hpp"
#include "cliffkern/numeric.hpp"

namespace cliffkern {

bool ParityReport::all_pass() const noexcept {
  for (const ParityEntry& e : entries)
    if (!e.pass()) return false;
  return !entries.empty();
}

std::string ParityReport::to_text() const {
  std::string out;
  char line[256];
  std::size_t failed = 0;
  for (const ParityEntry& e : entries) {
    if (!e.pass()) ++failed;
    std::snprintf(line, sizeof line, "%-11s %-32s %s %.3e  tol %.0e  cases %4zu  %s\n", e.suite.c_str(),
                  e.pair.c_str(), e.absolute ? "max_abs" : "max_rel", e.max_error, e.tolerance, e.cases,
                  e.pass() ? "PASS" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof line, "%s: %zu of %zu pairs within tolerance\n", failed == 0 ? "PASS" : "FAIL",
                entries.size() - failed, entries.size());
  out += line;
  return out;
}

OpSchedule corrupt_first_term(const OpSchedule& s) {
  std::vector<FmaTerm> terms = s.terms();
  if (!terms.empty()) terms.front().negate = !terms.front().negate;
  return OpSchedule(s.signature(), std::move(terms));
}

namespace {

class Collector {
 public:
  void add(const std::string& suite, const std::string& pair, double err, double tol, bool absolute) {
    const std::string key = suite + "\n" + pair;
    auto [it, inserted] = index_.try_emplace(key, entries_.size());
    if (inserted) entries_.push_back(ParityEntry{suite, pair, 0.0, tol, absolute, 0});
    ParityEntry& e = entries_[it->second];
    // NaN must fail, so it replaces any finite maximum.
    if (!(err <= e.max_error)) e.max_error = err;
    ++e.cases;
  }
  std::vector<ParityEntry> take() { return std::move(entries_); }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<ParityEntry> entries_;
};

void fill(std::span<float> v, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (float& x : v) x = dist(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

OpSchedule schedule_for(const OpSchedule& s, const ParityOptions& opts) {
  return opts.corrupt_schedule ? opts.corrupt_schedule(s) : s;
}

void schedule_suite(const Signature& sig, std::mt19937_64& rng, const ParityOptions& opts, Collector& out) {
  const BladeProductTable table(sig);
  const OpSchedule s = schedule_for(build_schedule(table), opts);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Multivector a(sig.n_blades()), b(sig.n_blades());
    fill(a.blades(), rng);
    fill(b.blades(), rng);
    worst = std::max(worst, max_relative_error(apply_schedule(s, a, b).blades(),
                                               geometric_product(a, b, table).blades()));
  }
  out.add("schedule", "apply_schedule vs product", worst, 1e-6, false);
}

void conv_suite(const Signature& sig, std::mt19937_64& rng, const ParityOptions& opts, Collector& out) {
  const std::size_t k = sig.k();
  const std::size_t max_image = k == 1 ? 12 : k == 2 ? 7 : 5;
  const std::size_t d_image = pick(rng, 3, max_image);
  const std::size_t d_filter = pick(rng, 1, std::min<std::size_t>(3, d_image));
  const std::size_t B = pick(rng, 0, 1) ? 16 : 8;
  const Dims dims = Dims::make(k, B, pick(rng, 1, 3), pick(rng, 1, 3), d_image, d_filter);
  ConvInput x(conv_input_shape(dims));
  ConvFilters f(conv_filters_shape(dims));
  ConvBias bias(conv_bias_shape(dims));
  fill(x.values(), rng);
  fill(f.values(), rng);
  fill(bias.values(), rng);

  ConvLayer layer(dims, sig, f, bias, KernelParams{native_vector_width(), 1});
  if (opts.corrupt_schedule) layer = layer.with_schedule(schedule_for(layer.schedule(), opts));
  const ConvOutput ref = conv_reference(x, layer);
  const ConvOutput ker = conv_kernelized(x, layer);
  ConvOutput packed(conv_output_shape(dims));
  conv_packed_forward(x.values(), packed.values(), layer);

  const std::string suite = "conv" + std::to_string(k) + "d";
  out.add(suite, "reference vs kernelized", max_relative_error(ker.values(), ref.values()), 1e-4, false);
  out.add(suite, "reference vs packed", max_relative_error(packed.values(), ref.values()), 1e-4, false);
}

void linear_suite(const Signature& sig, std::mt19937_64& rng, const ParityOptions& opts, Collector& out) {
  const std::size_t NB = sig.n_blades();
  const std::size_t B = 8, C_in = pick(rng, 1, 12), C_out = pick(rng, 1, 12);
  LinearInput x(linear_input_shape(B, C_in, NB));
  LinearWeight w(linear_weight_shape(C_in, C_out, NB));
  LinearBias bias(linear_bias_shape(C_out, NB));
  fill(x.values(), rng);
  fill(w.values(), rng);
  fill(bias.values(), rng);
  LinearLayer layer(sig, C_in, C_out, w, bias);
  if (opts.corrupt_schedule) layer = layer.with_schedule(schedule_for(layer.schedule(), opts));
  const LinearOutput ref = linear_reference(x, layer);
  const LinearOutput gemm = linear_blade_gemm(x, layer);
  out.add("linear", "blade_gemm vs reference", max_relative_error(gemm.values(), ref.values()), 1e-4, false);

  // Same layer as a 1x1 convolution over a single position.
  const Dims dims = Dims::make(sig.k(), B, C_in, C_out, 1, 1);
  ConvFilters f(conv_filters_shape(dims));
  for (std::size_t blade = 0; blade < NB; ++blade)
    for (std::size_t ci = 0; ci < C_in; ++ci)
      for (std::size_t co = 0; co < C_out; ++co)
        f[(blade * C_in + ci) * C_out + co] = w[(blade * C_out + co) * C_in + ci];
  const ConvLayer conv(dims, sig, f, ConvBias(conv_bias_shape(dims), bias.values()),
                       KernelParams{native_vector_width(), 1});
  ConvOutput y(conv_output_shape(dims));
  conv_packed_forward(x.values(), y.values(), conv);
  out.add("linear", "blade_gemm vs 1x1 conv", max_relative_error(gemm.values(), y.values()), 1e-5, false);
}

void activation_suite(const Signature& sig, std::mt19937_64& rng, Collector& out) {
  const std::size_t NB = sig.n_blades();
  std::vector<std::size_t> Ks{1, NB / 2, NB};
  Ks.erase(std::unique(Ks.begin(), Ks.end()), Ks.end());
  for (AggMode mode : {AggMode::Linear, AggMode::Sum, AggMode::Mean}) {
    for (std::size_t K : Ks) {
      // 13 exercises the scalar channel tail; 16 is specialization-eligible.
      for (std::size_t C : {std::size_t{13}, std::size_t{16}}) {
        const std::size_t B = 3;
        ActivationTensor x(activation_shape(B, C, NB));
        fill(x.values(), rng);
        for (float& v : x.values()) v *= 4.0f;
        std::vector<std::size_t> idx(NB);
        for (std::size_t i = 0; i < NB; ++i) idx[i] = i;
        if (!(mode == AggMode::Linear && K == NB)) std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(K);
        std::optional<std::vector<float>> weight, bias;
        if (mode == AggMode::Linear) {
          weight.emplace(C * K);
          bias.emplace(C);
          fill(*weight, rng);
          fill(*bias, rng);
        }
        const ActivationConfig cfg(sig, mode, idx, weight, bias);
        const ActivationTensor ref = activation_reference(x, cfg);
        const VPack vp = gather_vpack(x, cfg);
        const std::string m = to_string(mode);
        out.add("activation", m + " hoisted vs reference", max_abs_error(activation_hoisted(x, cfg).values(), ref.values()),
                1e-5, true);
        out.add("activation", m + " gathered vs reference",
                max_abs_error(activation_gathered(x, vp, cfg).values(), ref.values()), 1e-5, true);
        out.add("activation", m + " packed vs reference",
                max_abs_error(activation_packed(x, vp, cfg).values(), ref.values()), 1e-5, true);
        if (specialization_applies(C, cfg)) {
          out.add("activation", m + " specialized vs reference",
                  max_abs_error(activation_specialized(x, cfg).values(), ref.values()), 1e-5, true);
          out.add("activation", m + " spec_looped vs reference",
                  max_abs_error(activation_specialized_looped(x, cfg).values(), ref.values()), 1e-5, true);
        }
      }
    }
  }
}

}  // namespace

ParityReport parity_report(const ParityOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  Collector c;
  for (std::size_t k = 1; k <= 3; ++k) {
    for (const Signature& sig : all_signatures(k)) {
      schedule_suite(sig, rng, opts, c);
      conv_suite(sig, rng, opts, c);
      linear_suite(sig, rng, opts, c);
      activation_suite(sig, rng, c);
    }
  }
  return ParityReport{c.take()};
}

}  // namespace cliffkern
