#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "h2sgnn/model.hpp"
#include "h2sgnn/oracle.hpp"

// Cost of the full word expansion (R^k products per order) against the
// hybrid global filter (one operator application per order) on the same
// instance. The gap is the whole point of the beta-weighted sum.

namespace {

struct Instance {
  std::vector<h2sgnn::CsrMatrix> mats;
  std::vector<double> beta;
  h2sgnn::DenseMatrix x;
};

Instance make_instance(int relations, bench::idx_t n) {
  std::mt19937_64 rng(5);
  Instance inst;
  for (int r = 0; r < relations; ++r) {
    inst.mats.push_back(bench::random_graph(rng, n, 6));
    inst.beta.push_back(h2sgnn::uniform(rng, 0.25, 1.0));
  }
  inst.x = bench::random_panel(rng, n, 16);
  return inst;
}

void BM_word_expansion(benchmark::State& state) {
  const int R = 3;
  const int order = static_cast<int>(state.range(0));
  const Instance inst = make_instance(R, 1 << 9);
  for (auto _ : state) {
    h2sgnn::DenseMatrix acc(inst.x.n_rows, inst.x.n_cols);
    for (int k = 0; k <= order; ++k) {
      const h2sgnn::NcPolynomial poly = h2sgnn::expand_global_power(inst.beta, k);
      h2sgnn::axpy(1.0, h2sgnn::eval_ncpoly(poly, inst.mats, inst.x), acc);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_word_expansion)->DenseRange(1, 7);

void BM_hybrid_filter(benchmark::State& state) {
  const int R = 3;
  const int order = static_cast<int>(state.range(0));
  const Instance inst = make_instance(R, 1 << 9);
  std::vector<h2sgnn::MetaPathSubgraph> subgraphs;
  for (const auto& m : inst.mats)
    subgraphs.push_back({h2sgnn::MetaPath{"P", {"r"}}, m, m});
  const h2sgnn::LinearOp op = h2sgnn::global_operator(subgraphs, inst.beta);
  const h2sgnn::FilterBasis monomial{h2sgnn::BasisKind::Monomial, 0.0, 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(h2sgnn::propagate_basis(monomial, op, inst.x, order));
}
BENCHMARK(BM_hybrid_filter)->DenseRange(1, 7);

}  // namespace
