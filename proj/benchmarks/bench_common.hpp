#pragma once

#include <random>
#include <vector>

#include "h2sgnn/csr.hpp"
#include "h2sgnn/rng.hpp"

namespace bench {

using namespace h2sgnn;

inline CsrMatrix random_graph(std::mt19937_64& rng, idx_t n, idx_t avg_degree) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n * avg_degree));
  for (idx_t i = 0; i < n; ++i)
    for (idx_t d = 0; d < avg_degree; ++d) {
      const idx_t j = static_cast<idx_t>(uniform_index(rng, static_cast<std::uint64_t>(n)));
      trips.push_back({i, j, 1.0});
      trips.push_back({j, i, 1.0});
    }
  return sym_normalize(CsrMatrix::from_triplets(n, n, std::move(trips)));
}

inline DenseMatrix random_panel(std::mt19937_64& rng, idx_t rows, idx_t cols) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data) v = uniform(rng, -1.0, 1.0);
  return m;
}

}  // namespace bench
