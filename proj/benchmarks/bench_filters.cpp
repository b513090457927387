#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "h2sgnn/filters.hpp"

namespace {

void BM_propagate_basis(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const bench::idx_t n = 1 << 13;
  const int order = static_cast<int>(state.range(1));
  const bench::CsrMatrix a = bench::random_graph(rng, n, 8);
  const bench::DenseMatrix x = bench::random_panel(rng, n, 64);
  const h2sgnn::FilterBasis basis{static_cast<h2sgnn::BasisKind>(state.range(0)), 1.0, 1.0};
  h2sgnn::LinearOp op = [&a](const h2sgnn::DenseMatrix& v) { return h2sgnn::spmm(a, v); };
  for (auto _ : state)
    benchmark::DoNotOptimize(h2sgnn::propagate_basis(basis, op, x, order));
}
// {basis kind, order}
BENCHMARK(BM_propagate_basis)
    ->Args({0, 4})
    ->Args({0, 10})
    ->Args({1, 10})
    ->Args({2, 10});

}  // namespace
