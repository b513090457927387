#pragma once

#include <span>
#include <string>
#include <vector>

#include "h2sgnn/csr.hpp"

namespace h2sgnn {

struct NodeType {
  std::string name;
  idx_t count = 0;
};

struct Relation {
  std::string name;
  std::string src_type;
  std::string dst_type;
  CsrMatrix adj;  // shape (count(src_type), count(dst_type))
};

// Typed node sets plus typed relation matrices. Immutable after loading;
// meta-path subgraphs are induced from it, never added back.
struct HeteroGraph {
  std::vector<NodeType> node_types;
  std::vector<Relation> relations;
  std::string target_type;
  DenseMatrix features;    // n_target x d
  std::vector<int> labels;  // per target node, -1 when missing
  int num_classes = 0;

  idx_t type_count(const std::string& type_name) const;  // SchemaError if unknown
  bool has_relation(const std::string& name) const;
  const Relation& relation(const std::string& name) const;  // SchemaError if unknown
  idx_t total_nodes() const;
  idx_t total_edges() const;  // stored entries summed over relations

  void validate() const;
};

// Ordered relation sequence whose product induces a homogeneous subgraph on
// the target type.
struct MetaPath {
  std::string name;
  std::vector<std::string> relation_seq;
};

struct MetaPathSubgraph {
  MetaPath path;
  CsrMatrix raw_adj;   // path-instance counts
  CsrMatrix norm_adj;  // sym_normalize of the processed raw adjacency
};

struct SubgraphOptions {
  bool binarize = false;
  bool drop_selfloops = true;
};

// SchemaError when a relation is unknown, adjacent relations do not compose,
// or the path does not start and end on the target type.
void validate_metapath(const HeteroGraph& graph, const MetaPath& path);

// Left-to-right product of the relation matrices; entry (i, j) counts path
// instances from target i to target j.
CsrMatrix induce_metapath_adjacency(const HeteroGraph& graph, const MetaPath& path);

MetaPathSubgraph build_subgraph(const HeteroGraph& graph, const MetaPath& path,
                                const SubgraphOptions& options);

// Fraction of stored off-diagonal entries (u, v) with labels[u] == labels[v].
// Each stored entry counts once, so a symmetric matrix counts both
// directions. Throws ArgumentError when no such entry exists.
double edge_homophily(const CsrMatrix& adj, std::span<const int> labels);

}  // namespace h2sgnn
