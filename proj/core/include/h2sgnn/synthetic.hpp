#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "h2sgnn/dataio.hpp"

namespace h2sgnn {

// Deterministic synthetic datasets for tests and demos.
//
// Separable: target items with class-signal features under heavy noise, one
// homophilic meta-path (class-pure hub groups -> within-group cliques) and
// one heterophilic meta-path (mixed hubs -> cross-class edges). Designed so
// neither raw features nor a single subgraph reaches high accuracy alone.
//
// UniformLabel: the same structure with every label identical.
//
// Chain4: four nodes, labels (0,0,1,1), one self-relation with the
// undirected path 0-1-2-3.
enum class FixtureKind { Separable, UniformLabel, Chain4 };

FixtureKind parse_fixture_kind(const std::string& name);

struct SyntheticSpec {
  FixtureKind kind = FixtureKind::Separable;
  idx_t n_targets = 200;
  int num_classes = 2;
  idx_t group_size = 5;   // items per homophilic hub
  int het_degree = 5;     // mixed hubs per item
  int feature_dim = 8;
  double noise = 1.0;     // feature noise sigma
  double train_frac = 0.24;
  double val_frac = 0.06;
  std::uint64_t seed = 0;
};

DatasetBundle make_fixture(const SyntheticSpec& spec);

// The meta-paths the generated relations support: the homophilic
// item-group-item path and the heterophilic item-mix-item path.
std::vector<MetaPath> fixture_metapaths(FixtureKind kind);

}  // namespace h2sgnn
