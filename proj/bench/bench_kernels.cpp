// Serial reference kernels against their OpenMP counterparts. Each pair
// runs on identical inputs; the "threads" counter records the OpenMP pool.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "dsieve/kernels.hpp"
#include "dsieve/parallel.hpp"
#include "dsieve/rng.hpp"

namespace k = dsieve::kernels;

namespace {

void set_counters(benchmark::State& state, double items) {
  state.SetItemsProcessed(static_cast<std::int64_t>(items) * state.iterations());
  state.counters["threads"] = dsieve::parallel::max_threads();
}

template <bool Parallel>
void BM_SpfSegmented(benchmark::State& state) {
  const auto limit = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto v = Parallel ? k::omp::spf_segmented(limit, 1 << 18) : k::serial::spf_segmented(limit, 1 << 18);
    benchmark::DoNotOptimize(v.data());
  }
  set_counters(state, static_cast<double>(limit));
}

template <bool Parallel>
void BM_GSharpScan(benchmark::State& state) {
  const auto limit = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto s = Parallel ? k::omp::gsharp_scan(limit, 1 << 16, {}) : k::serial::gsharp_scan(limit, 1 << 16, {});
    benchmark::DoNotOptimize(s.argmin);
  }
  set_counters(state, static_cast<double>(limit));
}

template <bool Parallel>
void BM_SignedSums(benchmark::State& state) {
  std::vector<std::uint64_t> r;
  for (std::int64_t i = 0; i < state.range(0); ++i) r.push_back(std::uint64_t{1} << i);
  const std::uint64_t m = 1'000'003;
  for (auto _ : state) {
    auto v = Parallel ? k::omp::signed_sums(r, m) : k::serial::signed_sums(r, m);
    benchmark::DoNotOptimize(v.data());
  }
  set_counters(state, 1.0);
}

template <bool Parallel>
void BM_ExpSumMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  dsieve::Xorshift64Star rng(1);
  std::vector<std::complex<double>> w(n);
  std::vector<std::int64_t> ints(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = {rng.uniform(), rng.uniform()};
    ints[i] = static_cast<std::int64_t>(rng.below(1'000'000));
  }
  std::vector<k::Phase> phases;
  for (int j = 0; j < 256; ++j) phases.push_back(k::Phase::rational(rng.below(10'007), 10'007));
  std::vector<std::complex<double>> out(phases.size());
  for (auto _ : state) {
    if (Parallel) {
      k::omp::exp_sum_matrix(w, ints, phases, out);
    } else {
      k::serial::exp_sum_matrix(w, ints, phases, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  set_counters(state, static_cast<double>(n * phases.size()));
}

template <bool Parallel>
void BM_FourierSeries(benchmark::State& state) {
  dsieve::Xorshift64Star rng(2);
  std::vector<k::FourierBlock> blocks;
  for (std::uint64_t d = 1; d <= 400; d += 3) {
    k::FourierBlock b;
    b.d = d;
    for (std::uint64_t i = 0; i < d; ++i) b.weights.push_back({rng.uniform(), rng.uniform()});
    blocks.push_back(b);
  }
  std::vector<std::complex<double>> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if (Parallel) {
      k::omp::fourier_series_eval(blocks, 0, out);
    } else {
      k::serial::fourier_series_eval(blocks, 0, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  set_counters(state, static_cast<double>(out.size()));
}

}  // namespace

BENCHMARK(BM_SpfSegmented<false>)->Name("spf_segmented/serial")->Arg(10'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpfSegmented<true>)->Name("spf_segmented/omp")->Arg(10'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GSharpScan<false>)->Name("gsharp_scan/serial")->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GSharpScan<true>)->Name("gsharp_scan/omp")->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SignedSums<false>)->Name("signed_sums/serial")->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SignedSums<true>)->Name("signed_sums/omp")->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpSumMatrix<false>)->Name("exp_sum_matrix/serial")->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpSumMatrix<true>)->Name("exp_sum_matrix/omp")->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierSeries<false>)->Name("fourier_series/serial")->Arg(20'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierSeries<true>)->Name("fourier_series/omp")->Arg(20'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
