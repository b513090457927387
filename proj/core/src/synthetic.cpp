#include "h2sgnn/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "h2sgnn/errors.hpp"
#include "h2sgnn/rng.hpp"

namespace h2sgnn {

FixtureKind parse_fixture_kind(const std::string& name) {
  if (name == "separable") return FixtureKind::Separable;
  if (name == "uniform-label") return FixtureKind::UniformLabel;
  if (name == "chain4") return FixtureKind::Chain4;
  throw ArgumentError("unknown fixture kind: " + name +
                      " (expected separable|uniform-label|chain4)");
}

namespace {

DatasetBundle make_chain4() {
  DatasetBundle bundle;
  HeteroGraph& g = bundle.graph;
  g.node_types = {{"item", 4}};
  g.target_type = "item";
  g.num_classes = 2;
  g.labels = {0, 0, 1, 1};
  g.features = DenseMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  Relation e;
  e.name = "e";
  e.src_type = "item";
  e.dst_type = "item";
  e.adj = CsrMatrix::from_triplets(
      4, 4, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 1, 1}, {2, 3, 1}, {3, 2, 1}});
  g.relations.push_back(std::move(e));
  materialize_reverse_relations(g);
  bundle.masks.train = {0, 1};
  bundle.masks.val = {2};
  bundle.masks.test = {3};
  bundle.meta.name = "chain4";
  bundle.meta.target_type = "item";
  return bundle;
}

void stratified_split(const std::vector<int>& labels, int num_classes, double train_frac,
                      double val_frac, std::mt19937_64& rng, SplitMasks& masks) {
  for (int c = 0; c < num_classes; ++c) {
    std::vector<idx_t> ids;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) ids.push_back(static_cast<idx_t>(i));
    // Fisher-Yates with the shared deterministic rng.
    for (std::size_t i = ids.size(); i > 1; --i)
      std::swap(ids[i - 1], ids[uniform_index(rng, i)]);
    std::size_t n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(train_frac * static_cast<double>(ids.size())));
    std::size_t n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(val_frac * static_cast<double>(ids.size())));
    if (n_train + n_val + 1 > ids.size()) {
      n_train = ids.size() > 2 ? ids.size() - 2 : 1;
      n_val = ids.size() > 1 ? 1 : 0;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i < n_train)
        masks.train.push_back(ids[i]);
      else if (i < n_train + n_val)
        masks.val.push_back(ids[i]);
      else
        masks.test.push_back(ids[i]);
    }
  }
  std::sort(masks.train.begin(), masks.train.end());
  std::sort(masks.val.begin(), masks.val.end());
  std::sort(masks.test.begin(), masks.test.end());
}

}  // namespace

DatasetBundle make_fixture(const SyntheticSpec& spec) {
  if (spec.kind == FixtureKind::Chain4) return make_chain4();
  if (spec.n_targets < 4) throw ArgumentError("fixture: need at least 4 target nodes");
  if (spec.num_classes < 2) throw ArgumentError("fixture: need at least 2 structural classes");
  if (spec.feature_dim < spec.num_classes)
    throw ArgumentError("fixture: feature_dim must be >= num_classes");
  if (spec.group_size < 2) throw ArgumentError("fixture: group_size must be >= 2");

  std::mt19937_64 rng(spec.seed);
  const idx_t n = spec.n_targets;
  const int C = spec.num_classes;

  // Structural classes drive both hub wiring and (for Separable) labels.
  std::vector<int> cls(static_cast<std::size_t>(n));
  for (idx_t i = 0; i < n; ++i) cls[static_cast<std::size_t>(i)] = static_cast<int>(i) % C;
  std::vector<std::vector<idx_t>> by_class(static_cast<std::size_t>(C));
  for (idx_t i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])].push_back(i);

  // Homophilic hubs: chunk each class into groups; item-group-item induces
  // within-group same-class cliques.
  std::vector<Triplet> ig_edges;
  idx_t n_groups = 0;
  for (int c = 0; c < C; ++c) {
    const auto& ids = by_class[static_cast<std::size_t>(c)];
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
      const idx_t group = n_groups + static_cast<idx_t>(pos) / spec.group_size;
      ig_edges.push_back({ids[pos], group, 1.0});
    }
    n_groups += (static_cast<idx_t>(ids.size()) + spec.group_size - 1) / spec.group_size;
  }

  // Mixed hubs: each hub takes one item per class with class-dependent
  // offsets, so item-mix-item edges connect distinct classes.
  std::vector<Triplet> im_edges;
  idx_t n_mix = 0;
  const idx_t per_round = static_cast<idx_t>(by_class[0].size());
  for (int t = 0; t < spec.het_degree; ++t) {
    for (idx_t jj = 0; jj < per_round; ++jj) {
      const idx_t hub = n_mix++;
      for (int c = 0; c < C; ++c) {
        const auto& ids = by_class[static_cast<std::size_t>(c)];
        const idx_t pick = (jj + static_cast<idx_t>(t) * static_cast<idx_t>(c) +
                            static_cast<idx_t>(c)) %
                           static_cast<idx_t>(ids.size());
        im_edges.push_back({ids[static_cast<std::size_t>(pick)], hub, 1.0});
      }
    }
  }

  DatasetBundle bundle;
  HeteroGraph& g = bundle.graph;
  g.node_types = {{"item", n}, {"grp", n_groups}, {"mix", n_mix}};
  g.target_type = "item";
  {
    Relation ig{"ig", "item", "grp", CsrMatrix::from_triplets(n, n_groups, std::move(ig_edges))};
    Relation im{"im", "item", "mix", CsrMatrix::from_triplets(n, n_mix, std::move(im_edges))};
    g.relations.push_back(std::move(ig));
    g.relations.push_back(std::move(im));
  }
  materialize_reverse_relations(g);

  if (spec.kind == FixtureKind::UniformLabel) {
    g.num_classes = 1;
    g.labels.assign(static_cast<std::size_t>(n), 0);
  } else {
    g.num_classes = C;
    g.labels = cls;
  }

  // Class signal on the first C feature dimensions, noise everywhere.
  // Values are rounded through f32 so the on-disk payload round-trips.
  g.features = DenseMatrix(n, spec.feature_dim);
  for (idx_t i = 0; i < n; ++i) {
    for (int d = 0; d < spec.feature_dim; ++d) {
      double v = spec.noise * normal(rng);
      if (d == cls[static_cast<std::size_t>(i)]) v += 1.0;
      g.features.at(i, d) = static_cast<double>(static_cast<float>(v));
    }
  }

  stratified_split(g.labels, g.num_classes, spec.train_frac, spec.val_frac, rng, bundle.masks);
  bundle.meta.name = spec.kind == FixtureKind::UniformLabel ? "uniform-label" : "separable";
  bundle.meta.target_type = "item";
  bundle.validate();
  return bundle;
}

std::vector<MetaPath> fixture_metapaths(FixtureKind kind) {
  if (kind == FixtureKind::Chain4) return {MetaPath{"E", {"e"}}};
  return {MetaPath{"IGI", {"ig", "ig_rev"}}, MetaPath{"IMI", {"im", "im_rev"}}};
}

}  // namespace h2sgnn
