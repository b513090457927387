#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "h2sgnn/hetgraph.hpp"

namespace h2sgnn {

struct SplitMasks {
  std::vector<idx_t> train;
  std::vector<idx_t> val;
  std::vector<idx_t> test;
};

struct DatasetMeta {
  std::string name;
  std::string target_type;
  std::vector<std::string> class_names;
};

struct DatasetBundle {
  HeteroGraph graph;
  SplitMasks masks;
  DatasetMeta meta;

  void validate() const;  // mask disjointness, ranges, labeled mask nodes
};

// On-disk dataset layout (documented in the README):
//   schema.json   node types, relations (+ optional expected statistics)
//   <rel>.tsv     one edge per line: src<TAB>dst[<TAB>weight], ids 0-based
//   features.bin  magic "H2FEAT01", u32 dtype (0 = f32), u64 rows, u64 cols,
//                 then row-major little-endian payload (features.tsv fallback)
//   labels.tsv    node_id<TAB>class for labeled target nodes
//   splits.json   {"train": [...], "val": [...], "test": [...]}
// Loading materializes "<rel>_rev" (the transpose) for every relation;
// declared names must not use that suffix.
DatasetBundle load_dataset(const std::filesystem::path& dir, bool row_normalize_features = false);

void write_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir);

// Appends the "<rel>_rev" transposes. write_dataset skips them, so loading
// what it wrote reproduces the same relation list.
void materialize_reverse_relations(HeteroGraph& graph);

// Returns `name_or_path` if it is a directory, otherwise tries
// $H2SGNN_DATA_DIR/name_or_path. Throws IoError when neither exists.
std::filesystem::path resolve_dataset_dir(const std::string& name_or_path);

}  // namespace h2sgnn
