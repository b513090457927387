#pragma once

// Small in-memory model fixtures shared by model/train tests.

#include <random>
#include <vector>

#include "h2sgnn/model.hpp"
#include "support/reference.hpp"

namespace testref {

using namespace h2sgnn;

inline MetaPathSubgraph subgraph_from(const CsrMatrix& raw, const char* name = "P") {
  MetaPathSubgraph s;
  s.path = MetaPath{name, {"r"}};
  s.raw_adj = raw;
  s.norm_adj = sym_normalize(raw);
  return s;
}

inline MetaPathSubgraph subgraph_with_norm(const CsrMatrix& norm, const char* name = "P") {
  MetaPathSubgraph s;
  s.path = MetaPath{name, {"r"}};
  s.raw_adj = norm;
  s.norm_adj = norm;
  return s;
}

inline std::vector<MetaPathSubgraph> random_subgraphs(std::mt19937_64& rng, int count, idx_t n,
                                                      double density = 0.4) {
  std::vector<MetaPathSubgraph> out;
  for (int i = 0; i < count; ++i)
    out.push_back(subgraph_from(random_symmetric_nonneg_csr(rng, n, density)));
  return out;
}

inline ModelConfig small_config(int R, int K, BasisKind kind, Variant variant, int hidden,
                                int mlp_layers) {
  ModelConfig cfg;
  cfg.order = K;
  for (int i = 0; i < R; ++i) cfg.metapaths.push_back({"P" + std::to_string(i), {"r"}});
  cfg.local_basis = {FilterBasis{kind, 1.0, 1.0}};
  cfg.global_basis = FilterBasis{kind, 1.0, 1.0};
  cfg.hidden_dim = hidden;
  cfg.num_mlp_layers = mlp_layers;
  cfg.dropout = 0.0;
  cfg.variant = variant;
  return cfg;
}

inline ModelParams random_params(const ModelConfig& cfg, idx_t d, int num_classes,
                                 std::mt19937_64& rng) {
  ModelParams p = init_params(cfg, d, num_classes, rng);
  // Randomize everything, including biases, so gradient checks see no
  // accidental zeros.
  for (double& v : p.alpha.data) v = uniform(rng, -1.0, 1.0);
  for (double& v : p.beta) v = uniform(rng, -1.0, 1.0);
  for (double& v : p.gamma) v = uniform(rng, -1.0, 1.0);
  for (LinearLayer& l : p.mlp)
    for (double& v : l.bias) v = uniform(rng, -0.5, 0.5);
  return p;
}

}  // namespace testref
