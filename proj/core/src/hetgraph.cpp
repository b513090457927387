#include "h2sgnn/hetgraph.hpp"

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

idx_t HeteroGraph::type_count(const std::string& type_name) const {
  for (const NodeType& t : node_types)
    if (t.name == type_name) return t.count;
  throw SchemaError("unknown node type: " + type_name);
}

bool HeteroGraph::has_relation(const std::string& name) const {
  for (const Relation& r : relations)
    if (r.name == name) return true;
  return false;
}

const Relation& HeteroGraph::relation(const std::string& name) const {
  for (const Relation& r : relations)
    if (r.name == name) return r;
  throw SchemaError("unknown relation: " + name);
}

idx_t HeteroGraph::total_nodes() const {
  idx_t n = 0;
  for (const NodeType& t : node_types) n += t.count;
  return n;
}

idx_t HeteroGraph::total_edges() const {
  idx_t n = 0;
  for (const Relation& r : relations) n += r.adj.nnz();
  return n;
}

void HeteroGraph::validate() const {
  for (const Relation& r : relations) {
    r.adj.validate();
    if (r.adj.n_rows != type_count(r.src_type) || r.adj.n_cols != type_count(r.dst_type))
      throw ValidationError("relation " + r.name + " shape does not match its endpoint types");
  }
  const idx_t n_target = type_count(target_type);
  if (features.n_rows != n_target)
    throw ValidationError("feature rows != target node count");
  if (static_cast<idx_t>(labels.size()) != n_target)
    throw ValidationError("label count != target node count");
  for (int y : labels)
    if (y != -1 && (y < 0 || y >= num_classes))
      throw ValidationError("label outside [0, num_classes)");
}

void validate_metapath(const HeteroGraph& graph, const MetaPath& path) {
  if (path.relation_seq.empty())
    throw SchemaError("meta-path " + path.name + " has no relations");
  const Relation* prev = nullptr;
  for (const std::string& name : path.relation_seq) {
    const Relation& rel = graph.relation(name);
    if (prev && prev->dst_type != rel.src_type)
      throw SchemaError("meta-path " + path.name + ": relation " + name +
                        " does not compose with " + prev->name);
    prev = &rel;
  }
  const Relation& first = graph.relation(path.relation_seq.front());
  const Relation& last = graph.relation(path.relation_seq.back());
  if (first.src_type != graph.target_type || last.dst_type != graph.target_type)
    throw SchemaError("meta-path " + path.name + " must start and end on target type " +
                      graph.target_type);
}

CsrMatrix induce_metapath_adjacency(const HeteroGraph& graph, const MetaPath& path) {
  validate_metapath(graph, path);
  CsrMatrix product = graph.relation(path.relation_seq.front()).adj;
  for (std::size_t i = 1; i < path.relation_seq.size(); ++i)
    product = spgemm(product, graph.relation(path.relation_seq[i]).adj);
  return product;
}

MetaPathSubgraph build_subgraph(const HeteroGraph& graph, const MetaPath& path,
                                const SubgraphOptions& options) {
  MetaPathSubgraph sub;
  sub.path = path;
  sub.raw_adj = induce_metapath_adjacency(graph, path);
  CsrMatrix processed = sub.raw_adj;
  if (options.drop_selfloops) processed = drop_diagonal(processed);
  if (options.binarize) processed = binarize(processed);
  sub.norm_adj = sym_normalize(processed);
  return sub;
}

double edge_homophily(const CsrMatrix& adj, std::span<const int> labels) {
  if (adj.n_rows != adj.n_cols) throw ShapeError("edge_homophily: matrix not square");
  if (static_cast<idx_t>(labels.size()) != adj.n_rows)
    throw ShapeError("edge_homophily: label count != node count");
  idx_t edges = 0;
  idx_t same = 0;
  for (idx_t u = 0; u < adj.n_rows; ++u) {
    for (idx_t k = adj.row_ptr[u]; k < adj.row_ptr[u + 1]; ++k) {
      const idx_t v = adj.col_idx[static_cast<std::size_t>(k)];
      if (v == u) continue;  // a node trivially matches itself
      ++edges;
      if (labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)]) ++same;
    }
  }
  if (edges == 0) throw ArgumentError("edge_homophily: undefined on a graph with no edges");
  return static_cast<double>(same) / static_cast<double>(edges);
}

}  // namespace h2sgnn
