// Microbenchmarks for the layer kernels. Run pinned to one core, e.g.
//   taskset -c 2 ./build/benchmarks/cliffkern_microbench --benchmark_repetitions=5

#include <benchmark/benchmark.h>

#include <random>

#include "cliffkern/activation.hpp"
#include "cliffkern/conv.hpp"
#include "cliffkern/linear.hpp"

namespace ck = cliffkern;

namespace {

template <class T>
void randomize(T& t, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  for (float& v : t.values()) v = d(rng);
}

ck::Signature euclidean(std::size_t k) {
  std::vector<int> g(k, 1);
  return ck::Signature(std::span<const int>(g));
}

struct ConvFixture {
  ck::Dims dims;
  ck::ConvInput x;
  ck::ConvLayer layer;
  ck::PackedInput xp;
  ck::PackedOutput yp;

  ConvFixture(std::size_t k, std::size_t C, std::size_t d_image, std::size_t d_filter, std::size_t U)
      : dims(ck::Dims::make(k, 32, C, C, k == 3 ? d_image / 2 : d_image, d_filter)),
        x(ck::conv_input_shape(dims)),
        layer(make_layer(dims, U)),
        xp(ck::pack_input(x, dims, layer.params().L())),
        yp(ck::packed_output_shape(dims, layer.params().L())) {
    randomize(x, 1);
    xp = ck::pack_input(x, dims, layer.params().L());
  }

  static ck::ConvLayer make_layer(const ck::Dims& d, std::size_t U) {
    ck::ConvFilters f(ck::conv_filters_shape(d));
    ck::ConvBias b(ck::conv_bias_shape(d));
    randomize(f, 2);
    randomize(b, 3);
    ck::KernelParams p = ck::KernelParams::defaults();
    p.U = U;
    return ck::ConvLayer(d, euclidean(d.k), f, b, p);
  }

  void count(benchmark::State& state) const {
    state.counters["flops"] = benchmark::Counter(static_cast<double>(ck::conv_flops(dims, layer.schedule())),
                                                 benchmark::Counter::kIsIterationInvariantRate);
  }
};

void BM_ConvKernelized(benchmark::State& state) {
  ConvFixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 16, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ck::conv_kernelized(f.x, f.layer));
  f.count(state);
}

void BM_ConvPackedKernel(benchmark::State& state) {
  ConvFixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 16, 3,
                static_cast<std::size_t>(state.range(2)));
  for (auto _ : state) {
    f.layer.packed_kernel()(f.layer, f.xp.data(), f.yp.data());
    benchmark::ClobberMemory();
  }
  f.count(state);
}

void BM_LinearGemm(benchmark::State& state) {
  const auto C = static_cast<std::size_t>(state.range(0));
  const ck::Signature sig = euclidean(3);
  ck::LinearInput x(ck::linear_input_shape(64, C, 8));
  ck::LinearWeight w(ck::linear_weight_shape(C, C, 8));
  ck::LinearBias b(ck::linear_bias_shape(C, 8));
  randomize(x, 1);
  randomize(w, 2);
  randomize(b, 3);
  const ck::LinearLayer layer(sig, C, C, w, b);
  for (auto _ : state) benchmark::DoNotOptimize(ck::linear_blade_gemm(x, layer));
  state.counters["flops"] = benchmark::Counter(static_cast<double>(ck::linear_flops(64, C, C, layer.schedule())),
                                               benchmark::Counter::kIsIterationInvariantRate);
}

template <ck::ActivationTensor (*Fn)(const ck::ActivationTensor&, const ck::ActivationConfig&)>
void BM_Activation(benchmark::State& state) {
  const auto C = static_cast<std::size_t>(state.range(0));
  ck::ActivationTensor x(ck::activation_shape(64, C, 8));
  randomize(x, 1);
  const ck::ActivationConfig cfg(euclidean(3), ck::AggMode::Mean, {0, 1, 2, 3, 4, 5, 6, 7});
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, cfg));
  state.counters["flops"] =
      benchmark::Counter(static_cast<double>(ck::activation_flops(64, C, 8, 8, ck::AggMode::Mean)),
                         benchmark::Counter::kIsIterationInvariantRate);
}

}  // namespace

BENCHMARK(BM_ConvKernelized)->Args({2, 4})->Args({2, 8})->Args({3, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvPackedKernel)
    ->ArgsProduct({{1, 2, 3}, {4, 8}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearGemm)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Activation<ck::activation_reference>)->Arg(1024);
BENCHMARK(BM_Activation<ck::activation_hoisted>)->Arg(1024);
BENCHMARK(BM_Activation<ck::activation_specialized_looped>)->Arg(1024);
BENCHMARK(BM_Activation<ck::activation_specialized>)->Arg(1024);

BENCHMARK_MAIN();
