#include "cliffkern/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "cliffkern/conv.hpp"
#include "cliffkern/linear.hpp"
#include "cliffkern/numeric.hpp"

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#include <x86intrin.h>
#define CLIFFKERN_HAVE_TSC 1
#else
#define CLIFFKERN_HAVE_TSC 0
#endif

namespace cliffkern {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv1d: return "conv1d";
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Conv3d: return "conv3d";
    case LayerKind::Linear: return "linear";
    case LayerKind::Activation: return "activation";
  }
  return "unknown";
}

LayerKind parse_layer_kind(const std::string& text) {
  for (LayerKind k : {LayerKind::Conv1d, LayerKind::Conv2d, LayerKind::Conv3d, LayerKind::Linear,
                      LayerKind::Activation}) {
    if (to_string(k) == text) return k;
  }
  throw Error(Errc::ConfigInvalid, "unknown layer kind '" + text + "'");
}

bool is_conv(LayerKind kind) noexcept {
  return kind == LayerKind::Conv1d || kind == LayerKind::Conv2d || kind == LayerKind::Conv3d;
}

TimerKind parse_timer_kind(const std::string& text) {
  if (text == "wall" || text == "wall-clock") return TimerKind::WallClock;
  if (text == "cycles" || text == "cycle") return TimerKind::CycleCounter;
  throw Error(Errc::ConfigInvalid, "unknown timer '" + text + "' (wall or cycles)");
}

bool cycle_counter_available() noexcept { return CLIFFKERN_HAVE_TSC != 0; }

std::vector<std::string> default_variants(LayerKind kind) {
  if (is_conv(kind)) return {"reference", "kernelized", "packed", "packed_kernel"};
  if (kind == LayerKind::Linear) return {"reference", "kernelized", "traced", "gemm"};
  return {"baseline", "hoisted", "gathered", "packed", "specialized_looped", "specialized"};
}

double local_operation_intensity(std::size_t n_blades, std::size_t U) {
  if (U == 0) throw Error(Errc::ConfigInvalid, "unroll factor must be >= 1");
  return 8.0 * static_cast<double>(n_blades) / (8.0 + 1.0 / static_cast<double>(U));
}

namespace {

constexpr std::size_t kF = sizeof(float);

std::uint64_t read_cycles() noexcept {
#if CLIFFKERN_HAVE_TSC
  return __rdtsc();
#else
  return 0;
#endif
}

struct Timing {
  double median_s = 0.0;
  double min_s = 0.0;
  std::optional<double> median_cycles;
};

template <class T>
T median_of(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

Timing time_runs(const std::function<void()>& run, const BenchConfig& cfg) {
  for (std::size_t i = 0; i < cfg.warmup; ++i) run();
  std::vector<double> secs, cycles;
  secs.reserve(cfg.repetitions);
  for (std::size_t i = 0; i < cfg.repetitions; ++i) {
    const std::uint64_t c0 = read_cycles();
    const auto t0 = std::chrono::steady_clock::now();
    run();
    const auto t1 = std::chrono::steady_clock::now();
    const std::uint64_t c1 = read_cycles();
    secs.push_back(std::chrono::duration<double>(t1 - t0).count());
    cycles.push_back(static_cast<double>(c1 - c0));
  }
  Timing t;
  t.median_s = median_of(secs);
  t.min_s = *std::min_element(secs.begin(), secs.end());
  if (cfg.timer == TimerKind::CycleCounter) t.median_cycles = median_of(cycles);
  return t;
}

struct Variant {
  std::string name;
  std::size_t W = 0, U = 0;
  std::size_t bytes = 0;
  std::function<void()> run;
  /// Output of the last run, as a flat span in the reference's layout.
  std::function<std::vector<float>()> output;
};

struct PointInfo {
  std::string kind;
  std::size_t k = 0, B = 0, C_in = 0, C_out = 0, d_image = 0, d_filter = 0;
  std::int64_t flops = 0;
  bool verify = false;
  bool absolute = false;  // activation compares absolutely
  double tolerance = 1e-4;
};

void finish_point(const BenchConfig& cfg, const PointInfo& info, std::vector<Variant>& variants,
                  const std::function<std::vector<float>()>& reference, std::vector<BenchRecord>& out) {
  std::vector<float> expected;
  if (info.verify) expected = reference();
  for (Variant& v : variants) {
    BenchRecord r;
    r.kind = info.kind;
    r.variant = v.name;
    r.k = info.k;
    r.B = info.B;
    r.C_in = info.C_in;
    r.C_out = info.C_out;
    r.d_image = info.d_image;
    r.d_filter = info.d_filter;
    r.W = v.W;
    r.U = v.U;
    r.flops = info.flops;
    r.bytes = v.bytes;
    if (cfg.verify) {
      if (info.verify) {
        // Untimed run; its measurements never enter the statistics below.
        v.run();
        const std::vector<float> got = v.output();
        r.max_error = info.absolute ? max_abs_error(got, expected) : max_relative_error(got, expected);
        if (!(r.max_error <= info.tolerance)) {
          throw Error(Errc::VerificationFailed, info.kind + " variant " + v.name + " at B=" + std::to_string(info.B) +
                                                    " C_in=" + std::to_string(info.C_in) +
                                                    ": error " + std::to_string(r.max_error) + " exceeds " +
                                                    std::to_string(info.tolerance));
        }
        r.verification = Verification::Passed;
      } else {
        r.verification = Verification::Skipped;
      }
    }
    const Timing t = time_runs(v.run, cfg);
    r.median_s = t.median_s;
    r.min_s = t.min_s;
    r.flops_per_s = t.median_s > 0 ? static_cast<double>(r.flops) / t.median_s : 0.0;
    if (t.median_cycles && *t.median_cycles > 0) r.flops_per_cycle = static_cast<double>(r.flops) / *t.median_cycles;
    r.unstable = t.min_s > 0 && t.median_s / t.min_s > 1.2;
    out.push_back(std::move(r));
  }
}

void fill_uniform(std::span<float> v, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (float& x : v) x = dist(rng);
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  return (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
}

bool contains(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

void require_nonempty_positive(const std::vector<std::size_t>& v, const char* name) {
  if (v.empty()) throw Error(Errc::ConfigInvalid, std::string("sweep list ") + name + " is empty");
  for (std::size_t x : v)
    if (x == 0) throw Error(Errc::ConfigInvalid, std::string("sweep list ") + name + " contains 0");
}

std::size_t conv_dimension(LayerKind kind) {
  return kind == LayerKind::Conv1d ? 1 : kind == LayerKind::Conv2d ? 2 : 3;
}

struct ChannelPair {
  std::size_t in, out;
};

std::vector<ChannelPair> channel_pairs(const BenchConfig& cfg) {
  std::vector<ChannelPair> pairs;
  if (!cfg.C.empty()) {
    for (std::size_t c : cfg.C) pairs.push_back({c, c});
  } else {
    for (std::size_t ci : cfg.C_in)
      for (std::size_t co : cfg.C_out) pairs.push_back({ci, co});
  }
  return pairs;
}

void run_conv(const BenchConfig& cfg, const Signature& sig, const std::vector<std::string>& names,
              const std::vector<std::size_t>& Ws, std::vector<BenchRecord>& out) {
  const std::size_t k = conv_dimension(cfg.kind);
  std::size_t index = 0;
  for (std::size_t B : cfg.B)
    for (ChannelPair ch : channel_pairs(cfg))
      for (std::size_t di : cfg.d_image)
        for (std::size_t df : cfg.d_filter) {
          if (df > di) throw Error(Errc::ConfigInvalid, "d_filter exceeds d_image");
          const Dims dims = Dims::make(k, B, ch.in, ch.out, di, df);
          std::mt19937_64 rng(point_seed(cfg.seed, index++));
          ConvInput x(conv_input_shape(dims));
          ConvFilters f(conv_filters_shape(dims));
          ConvBias bias(conv_bias_shape(dims));
          fill_uniform(x.values(), rng);
          fill_uniform(f.values(), rng);
          fill_uniform(bias.values(), rng);

          const ConvLayer base(dims, sig, f, bias, KernelParams{Ws.front(), 1});
          const std::size_t NB = dims.n_blades();
          const std::size_t in_n = x.values().size(), out_n = shape_volume(conv_output_shape(dims));
          const std::size_t f_n = f.values().size(), b_n = bias.values().size();
          const std::size_t expanded_n = ch.out * NB * ch.in * NB * dims.filter_positions();

          PointInfo info;
          info.kind = to_string(cfg.kind);
          info.k = k;
          info.B = B;
          info.C_in = ch.in;
          info.C_out = ch.out;
          info.d_image = di;
          info.d_filter = df;
          info.flops = conv_flops(dims, base.schedule());
          info.verify = cfg.verify && out_n <= cfg.verify_max_elements && info.flops <= cfg.verify_max_flops;

          std::vector<Variant> variants;
          // Shared output storage; each variant overwrites it.
          auto y = std::make_shared<FloatBuffer>(out_n);
          for (const std::string& name : names) {
            if (name == "reference" || name == "kernelized") {
              Variant v;
              v.name = name;
              v.bytes = kF * (in_n + (name == "reference" ? f_n : expanded_n) + b_n + out_n);
              if (name == "reference") {
                v.run = [&, y] { conv_reference_forward(x.values(), *y, base); };
              } else {
                v.run = [&, y] { conv_kernelized_forward(x.values(), *y, base); };
              }
              v.output = [y] { return std::vector<float>(y->begin(), y->end()); };
              variants.push_back(std::move(v));
              continue;
            }
            for (std::size_t W : Ws)
              for (std::size_t U : cfg.U) {
                const KernelParams params{W, U};
                if (B % params.L() != 0) {
                  throw Error(Errc::ConfigInvalid, "B=" + std::to_string(B) + " is not a multiple of L=W*U=" +
                                                       std::to_string(params.L()));
                }
                auto layer = std::make_shared<ConvLayer>(dims, sig, f, bias, params);
                const std::size_t pin_n = shape_volume(packed_input_shape(dims, params.L()));
                const std::size_t pf_n = layer->packed_filters().values().size();
                Variant v;
                v.name = name;
                v.W = W;
                v.U = U;
                if (name == "packed") {
                  v.bytes = kF * (in_n + pin_n + pf_n + b_n + out_n + out_n);
                  v.run = [&, y, layer] { conv_packed_forward(x.values(), *y, *layer); };
                  v.output = [y] { return std::vector<float>(y->begin(), y->end()); };
                } else {
                  auto xp = std::make_shared<PackedInput>(pack_input(x, dims, params.L()));
                  auto yp = std::make_shared<PackedOutput>(packed_output_shape(dims, params.L()));
                  v.bytes = kF * (pin_n + pf_n + b_n + out_n);
                  v.run = [layer, xp, yp] { layer->packed_kernel()(*layer, xp->data(), yp->data()); };
                  v.output = [yp, dims, params] {
                    const ConvOutput u = unpack_output(*yp, dims, params.L());
                    return std::vector<float>(u.values().begin(), u.values().end());
                  };
                }
                variants.push_back(std::move(v));
              }
          }
          finish_point(cfg, info, variants,
                       [&] {
                         const ConvOutput r = conv_reference(x, base);
                         return std::vector<float>(r.values().begin(), r.values().end());
                       },
                       out);
        }
}

void run_linear(const BenchConfig& cfg, const Signature& sig, const std::vector<std::string>& names,
                std::vector<BenchRecord>& out) {
  std::size_t index = 0;
  for (std::size_t B : cfg.B)
    for (ChannelPair ch : channel_pairs(cfg)) {
      const std::size_t NB = sig.n_blades();
      std::mt19937_64 rng(point_seed(cfg.seed, index++));
      LinearInput x(linear_input_shape(B, ch.in, NB));
      LinearWeight w(linear_weight_shape(ch.in, ch.out, NB));
      LinearBias bias(linear_bias_shape(ch.out, NB));
      fill_uniform(x.values(), rng);
      fill_uniform(w.values(), rng);
      fill_uniform(bias.values(), rng);
      const LinearLayer layer(sig, ch.in, ch.out, w, bias);

      const std::size_t x_n = x.values().size(), w_n = w.values().size(), b_n = bias.values().size();
      const std::size_t y_n = B * ch.out * NB;

      PointInfo info;
      info.kind = "linear";
      info.k = sig.k();
      info.B = B;
      info.C_in = ch.in;
      info.C_out = ch.out;
      info.flops = linear_flops(B, ch.in, ch.out, layer.schedule());
      info.verify = cfg.verify && y_n <= cfg.verify_max_elements && info.flops <= cfg.verify_max_flops;

      auto y = std::make_shared<LinearOutput>(linear_output_shape(B, ch.out, NB));
      std::vector<Variant> variants;
      for (const std::string& name : names) {
        Variant v;
        v.name = name;
        if (name == "reference") {
          v.bytes = kF * (x_n + w_n + b_n + y_n);
          v.run = [&, y] { *y = linear_reference(x, layer); };
        } else if (name == "kernelized") {
          v.bytes = kF * (x_n + ch.out * NB * ch.in * NB + b_n + y_n);
          v.run = [&, y] { *y = linear_kernelized(x, layer); };
        } else if (name == "traced") {
          v.bytes = kF * (x_n + w_n + b_n + y_n);
          v.run = [&, y] { *y = linear_traced(x, layer); };
        } else {
          v.bytes = kF * (x_n + x_n + w_n + y_n + b_n + y_n);
          v.run = [&, y] { *y = linear_blade_gemm(x, layer); };
        }
        v.output = [y] { return std::vector<float>(y->values().begin(), y->values().end()); };
        variants.push_back(std::move(v));
      }
      finish_point(cfg, info, variants,
                   [&] {
                     const LinearOutput r = linear_reference(x, layer);
                     return std::vector<float>(r.values().begin(), r.values().end());
                   },
                   out);
    }
}

void run_activation(const BenchConfig& cfg, const Signature& sig, const std::vector<std::string>& names,
                    bool explicit_variants, std::vector<BenchRecord>& out) {
  const std::size_t NB = sig.n_blades();
  std::size_t index = 0;
  const std::vector<std::size_t> channels = cfg.C.empty() ? cfg.C_in : cfg.C;
  for (std::size_t B : cfg.B)
    for (std::size_t C : channels)
      for (std::size_t K0 : cfg.K) {
        const std::size_t K = K0 == 0 ? NB : K0;
        if (K > NB) throw Error(Errc::ConfigInvalid, "K=" + std::to_string(K) + " exceeds N_B=" + std::to_string(NB));
        std::mt19937_64 rng(point_seed(cfg.seed, index++));
        ActivationTensor x(activation_shape(B, C, NB));
        fill_uniform(x.values(), rng);
        std::vector<std::size_t> indices(K);
        for (std::size_t i = 0; i < K; ++i) indices[i] = i;
        std::optional<std::vector<float>> weight, bias;
        if (cfg.mode == AggMode::Linear) {
          weight.emplace(C * K);
          bias.emplace(C);
          fill_uniform(*weight, rng);
          fill_uniform(*bias, rng);
        }
        const ActivationConfig acfg(sig, cfg.mode, indices, weight, bias);
        const std::size_t x_n = x.values().size();
        const std::size_t p_n = cfg.mode == AggMode::Linear ? C * K + C : 0;
        const std::size_t vp_n = B * C * K;

        PointInfo info;
        info.kind = "activation_" + to_string(cfg.mode) + "_K" + std::to_string(K);
        info.k = sig.k();
        info.B = B;
        info.C_in = C;
        info.C_out = C;
        info.flops = activation_flops(B, C, NB, K, cfg.mode);
        info.verify = cfg.verify && x_n <= cfg.verify_max_elements;
        info.absolute = true;
        info.tolerance = 1e-5;

        auto y = std::make_shared<ActivationTensor>(x.shape());
        std::vector<Variant> variants;
        for (const std::string& name : names) {
          if ((name == "specialized" || name == "specialized_looped") && !specialization_applies(C, acfg)) {
            if (!explicit_variants) continue;
            throw Error(Errc::ConfigInvalid, name + " needs K == N_B in {4, 8} and C % 8 == 0");
          }
          Variant v;
          v.name = name;
          v.bytes = kF * (2 * x_n + p_n);
          if (name == "baseline") {
            v.run = [&, y] { *y = activation_reference(x, acfg); };
          } else if (name == "hoisted") {
            v.run = [&, y] { *y = activation_hoisted(x, acfg); };
          } else if (name == "gathered") {
            v.bytes += kF * vp_n;
            v.run = [&, y] { *y = activation_gathered(x, gather_vpack(x, acfg), acfg); };
          } else if (name == "packed") {
            v.bytes += kF * vp_n;
            v.run = [&, y] { *y = activation_packed(x, gather_vpack(x, acfg), acfg); };
          } else if (name == "specialized_looped") {
            v.run = [&, y] { *y = activation_specialized_looped(x, acfg); };
          } else {
            v.run = [&, y] { *y = activation_specialized(x, acfg); };
          }
          v.output = [y] { return std::vector<float>(y->values().begin(), y->values().end()); };
          variants.push_back(std::move(v));
        }
        finish_point(cfg, info, variants,
                     [&] {
                       const ActivationTensor r = activation_reference(x, acfg);
                       return std::vector<float>(r.values().begin(), r.values().end());
                     },
                     out);
      }
}

}  // namespace

std::vector<BenchRecord> run_sweep(const BenchConfig& cfg) {
  if (cfg.repetitions < 3) throw Error(Errc::ConfigInvalid, "repetitions must be >= 3");
  if (cfg.timer == TimerKind::CycleCounter && !cycle_counter_available()) {
    throw Error(Errc::ConfigInvalid, "no cycle counter on this platform");
  }
  const std::size_t k = is_conv(cfg.kind) ? conv_dimension(cfg.kind) : cfg.k;
  if (k < 1 || k > 3) throw Error(Errc::ConfigInvalid, "k must be 1, 2 or 3");
  std::vector<int> ones(k, 1);
  const Signature sig = cfg.signature ? *cfg.signature : Signature(std::span<const int>(ones));
  if (sig.k() != k) {
    throw Error(Errc::ConfigInvalid, "signature " + sig.to_string() + " does not have dimension " + std::to_string(k));
  }

  require_nonempty_positive(cfg.B, "B");
  if (cfg.C.empty()) {
    require_nonempty_positive(cfg.C_in, "C_in");
    if (cfg.kind != LayerKind::Activation) require_nonempty_positive(cfg.C_out, "C_out");
  } else {
    require_nonempty_positive(cfg.C, "C");
  }
  if (is_conv(cfg.kind)) {
    require_nonempty_positive(cfg.d_image, "d_image");
    require_nonempty_positive(cfg.d_filter, "d_filter");
    require_nonempty_positive(cfg.U, "U");
  }
  if (cfg.kind == LayerKind::Activation && cfg.K.empty()) throw Error(Errc::ConfigInvalid, "sweep list K is empty");

  const std::vector<std::string> allowed = default_variants(cfg.kind);
  const bool explicit_variants = !cfg.variants.empty();
  const std::vector<std::string> names = explicit_variants ? cfg.variants : allowed;
  for (const std::string& n : names) {
    if (!contains(allowed, n)) {
      throw Error(Errc::ConfigInvalid, "variant '" + n + "' does not exist for " + to_string(cfg.kind));
    }
  }

  std::vector<std::size_t> Ws = cfg.W;
  if (Ws.empty()) Ws.push_back(KernelParams::defaults().W);
  require_nonempty_positive(Ws, "W");

  std::vector<BenchRecord> records;
  if (is_conv(cfg.kind)) {
    run_conv(cfg, sig, names, Ws, records);
  } else if (cfg.kind == LayerKind::Linear) {
    run_linear(cfg, sig, names, records);
  } else {
    run_activation(cfg, sig, names, explicit_variants, records);
  }
  return records;
}

}  // namespace cliffkern
