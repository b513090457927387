#include <benchmark/benchmark.h>

#include "bench_common.hpp"

namespace {

void BM_spmm(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const bench::idx_t n = state.range(0);
  const bench::CsrMatrix a = bench::random_graph(rng, n, 8);
  const bench::DenseMatrix x = bench::random_panel(rng, n, 64);
  for (auto _ : state) benchmark::DoNotOptimize(h2sgnn::spmm(a, x));
  state.SetItemsProcessed(state.iterations() * a.nnz() * x.n_cols);
}
BENCHMARK(BM_spmm)->Arg(1 << 10)->Arg(1 << 13)->Arg(1 << 16);

void BM_spgemm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const bench::idx_t n = state.range(0);
  const bench::CsrMatrix a = bench::random_graph(rng, n, 6);
  const bench::CsrMatrix b = bench::random_graph(rng, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(h2sgnn::spgemm(a, b));
}
BENCHMARK(BM_spgemm)->Arg(1 << 9)->Arg(1 << 12)->Arg(1 << 14);

void BM_sym_normalize(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const bench::idx_t n = state.range(0);
  std::vector<h2sgnn::Triplet> trips;
  for (bench::idx_t i = 0; i < n; ++i)
    for (int d = 0; d < 8; ++d)
      trips.push_back({i, static_cast<bench::idx_t>(h2sgnn::uniform_index(rng, n)), 1.0});
  const bench::CsrMatrix a = bench::CsrMatrix::from_triplets(n, n, std::move(trips));
  for (auto _ : state) benchmark::DoNotOptimize(h2sgnn::sym_normalize(a));
}
BENCHMARK(BM_sym_normalize)->Arg(1 << 12)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
