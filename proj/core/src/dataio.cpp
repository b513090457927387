#include "h2sgnn/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return j;
}

idx_t parse_id(const std::string& token, const std::filesystem::path& file, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(token, &pos);
    if (pos != token.size() || v < 0) throw std::invalid_argument("");
    return static_cast<idx_t>(v);
  } catch (...) {
    throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                          ": malformed id '" + token + "'");
  }
}

CsrMatrix load_edge_file(const std::filesystem::path& file, idx_t n_src, idx_t n_dst) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<Triplet> trips;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string src_tok, dst_tok, w_tok;
    if (!(ss >> src_tok >> dst_tok))
      throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                            ": expected 'src<TAB>dst[<TAB>weight]'");
    const idx_t src = parse_id(src_tok, file, line_no);
    const idx_t dst = parse_id(dst_tok, file, line_no);
    if (src >= n_src)
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": src id " +
                            std::to_string(src) + " >= type count " + std::to_string(n_src));
    if (dst >= n_dst)
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": dst id " +
                            std::to_string(dst) + " >= type count " + std::to_string(n_dst));
    double w = 1.0;
    if (ss >> w_tok) {
      char* end = nullptr;
      w = std::strtod(w_tok.c_str(), &end);
      if (end != w_tok.c_str() + w_tok.size() || !std::isfinite(w))
        throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                              ": malformed weight '" + w_tok + "'");
    }
    trips.push_back({src, dst, w});
  }
  return CsrMatrix::from_triplets(n_src, n_dst, std::move(trips));
}

constexpr char kFeatureMagic[8] = {'H', '2', 'F', 'E', 'A', 'T', '0', '1'};

DenseMatrix load_features_bin(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kFeatureMagic))
    throw FormatError(file.string() + ": bad magic");
  std::uint32_t dtype = 0;
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&dtype), sizeof dtype);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || dtype != 0) throw FormatError(file.string() + ": unsupported header");
  DenseMatrix m(static_cast<idx_t>(rows), static_cast<idx_t>(cols));
  std::vector<float> buf(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw FormatError(file.string() + ": truncated payload");
  for (std::size_t i = 0; i < buf.size(); ++i) m.data[i] = static_cast<double>(buf[i]);
  return m;
}

DenseMatrix load_features_tsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size())
        throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                              ": malformed value '" + tok + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  DenseMatrix m(static_cast<idx_t>(rows.size()),
                rows.empty() ? 0 : static_cast<idx_t>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(),
              m.data.begin() + static_cast<std::ptrdiff_t>(i * rows.front().size()));
  return m;
}

std::vector<idx_t> parse_id_array(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw ValidationError(what + " must be an array");
  std::vector<idx_t> out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number_integer()) throw ValidationError(what + " must contain integers");
    out.push_back(v.get<idx_t>());
  }
  return out;
}

}  // namespace

void DatasetBundle::validate() const {
  graph.validate();
  const idx_t n_target = graph.type_count(graph.target_type);
  std::unordered_set<idx_t> seen;
  auto check_mask = [&](const std::vector<idx_t>& mask, const char* name) {
    for (idx_t id : mask) {
      if (id < 0 || id >= n_target)
        throw ValidationError(std::string(name) + " mask id out of range: " + std::to_string(id));
      if (!seen.insert(id).second)
        throw ValidationError("masks overlap at node " + std::to_string(id));
      if (graph.labels[static_cast<std::size_t>(id)] < 0)
        throw ValidationError(std::string(name) + " mask node " + std::to_string(id) +
                              " has no label");
    }
  };
  check_mask(masks.train, "train");
  check_mask(masks.val, "val");
  check_mask(masks.test, "test");
}

void materialize_reverse_relations(HeteroGraph& graph) {
  const std::size_t declared = graph.relations.size();
  graph.relations.reserve(declared * 2);
  for (std::size_t i = 0; i < declared; ++i) {
    const Relation& r = graph.relations[i];
    Relation rev;
    rev.name = r.name + "_rev";
    rev.src_type = r.dst_type;
    rev.dst_type = r.src_type;
    rev.adj = transpose(r.adj);
    graph.relations.push_back(std::move(rev));
  }
}

DatasetBundle load_dataset(const std::filesystem::path& dir, bool row_normalize_features) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("dataset directory not found: " + dir.string());
  const json schema = read_json_file(dir / "schema.json");

  DatasetBundle bundle;
  HeteroGraph& g = bundle.graph;
  try {
    bundle.meta.name = schema.at("name").get<std::string>();
    g.target_type = schema.at("target_type").get<std::string>();
    g.num_classes = schema.at("num_classes").get<int>();
    if (schema.contains("class_names"))
      bundle.meta.class_names = schema["class_names"].get<std::vector<std::string>>();
    for (const json& t : schema.at("node_types"))
      g.node_types.push_back({t.at("name").get<std::string>(), t.at("count").get<idx_t>()});
  } catch (const json::exception& e) {
    throw ValidationError("schema.json: " + std::string(e.what()));
  }
  bundle.meta.target_type = g.target_type;

  for (const json& r : schema.at("relations")) {
    Relation rel;
    try {
      rel.name = r.at("name").get<std::string>();
      rel.src_type = r.at("src").get<std::string>();
      rel.dst_type = r.at("dst").get<std::string>();
    } catch (const json::exception& e) {
      throw ValidationError("schema.json relations: " + std::string(e.what()));
    }
    if (rel.name.size() >= 4 && rel.name.ends_with("_rev"))
      throw SchemaError("relation name '" + rel.name + "' uses the reserved _rev suffix");
    const std::string file = r.contains("file") ? r["file"].get<std::string>() : rel.name + ".tsv";
    rel.adj = load_edge_file(dir / file, g.type_count(rel.src_type), g.type_count(rel.dst_type));
    g.relations.push_back(std::move(rel));
  }

  // Expected statistics, when declared, are checked before the transposes
  // are added so "edges" means stored entries of the declared relations.
  if (schema.contains("statistics")) {
    const json& st = schema["statistics"];
    if (st.contains("nodes") && st["nodes"].get<idx_t>() != g.total_nodes())
      throw ValidationError("schema.json statistics: expected " +
                            std::to_string(st["nodes"].get<idx_t>()) + " nodes, found " +
                            std::to_string(g.total_nodes()));
    if (st.contains("edges") && st["edges"].get<idx_t>() != g.total_edges())
      throw ValidationError("schema.json statistics: expected " +
                            std::to_string(st["edges"].get<idx_t>()) + " edges, found " +
                            std::to_string(g.total_edges()));
  }
  materialize_reverse_relations(g);

  const idx_t n_target = g.type_count(g.target_type);
  if (std::filesystem::exists(dir / "features.bin"))
    g.features = load_features_bin(dir / "features.bin");
  else if (std::filesystem::exists(dir / "features.tsv"))
    g.features = load_features_tsv(dir / "features.tsv");
  else
    throw IoError("neither features.bin nor features.tsv found in " + dir.string());
  if (g.features.n_rows != n_target)
    throw ValidationError("features: " + std::to_string(g.features.n_rows) +
                          " rows, expected " + std::to_string(n_target));
  if (row_normalize_features) {
    for (idx_t i = 0; i < g.features.n_rows; ++i) {
      double norm = 0.0;
      for (double v : g.features.row(i)) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (double& v : g.features.row(i)) v /= norm;
    }
  }

  g.labels.assign(static_cast<std::size_t>(n_target), -1);
  {
    const std::filesystem::path file = dir / "labels.tsv";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::string id_tok, cls_tok;
      if (!(ss >> id_tok >> cls_tok))
        throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                              ": expected 'node_id<TAB>class'");
      const idx_t id = parse_id(id_tok, file, line_no);
      const idx_t cls = parse_id(cls_tok, file, line_no);
      if (id >= n_target)
        throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": node id " +
                              std::to_string(id) + " >= target count");
      if (cls >= g.num_classes)
        throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": class " +
                              std::to_string(cls) + " >= num_classes");
      g.labels[static_cast<std::size_t>(id)] = static_cast<int>(cls);
    }
  }

  const json splits = read_json_file(dir / "splits.json");
  bundle.masks.train = parse_id_array(splits.at("train"), "splits.json train");
  bundle.masks.val = parse_id_array(splits.at("val"), "splits.json val");
  bundle.masks.test = parse_id_array(splits.at("test"), "splits.json test");

  bundle.validate();
  return bundle;
}

void write_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const HeteroGraph& g = bundle.graph;

  json schema;
  schema["name"] = bundle.meta.name;
  schema["target_type"] = g.target_type;
  schema["num_classes"] = g.num_classes;
  if (!bundle.meta.class_names.empty()) schema["class_names"] = bundle.meta.class_names;
  schema["node_types"] = json::array();
  for (const NodeType& t : g.node_types)
    schema["node_types"].push_back({{"name", t.name}, {"count", t.count}});
  schema["relations"] = json::array();
  for (const Relation& r : g.relations) {
    if (r.name.ends_with("_rev")) continue;  // regenerated on load
    schema["relations"].push_back(
        {{"name", r.name}, {"src", r.src_type}, {"dst", r.dst_type}, {"file", r.name + ".tsv"}});
    std::ofstream out(dir / (r.name + ".tsv"));
    if (!out) throw IoError("cannot write " + (dir / (r.name + ".tsv")).string());
    char buf[64];
    for (idx_t i = 0; i < r.adj.n_rows; ++i)
      for (idx_t k = r.adj.row_ptr[i]; k < r.adj.row_ptr[i + 1]; ++k) {
        const double w = r.adj.values[static_cast<std::size_t>(k)];
        out << i << '\t' << r.adj.col_idx[static_cast<std::size_t>(k)];
        if (w != 1.0) {
          std::snprintf(buf, sizeof buf, "%.17g", w);
          out << '\t' << buf;
        }
        out << '\n';
      }
  }
  {
    std::ofstream out(dir / "schema.json");
    out << schema.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "features.bin", std::ios::binary);
    if (!out) throw IoError("cannot write features.bin");
    out.write(kFeatureMagic, 8);
    const std::uint32_t dtype = 0;
    const std::uint64_t rows = static_cast<std::uint64_t>(g.features.n_rows);
    const std::uint64_t cols = static_cast<std::uint64_t>(g.features.n_cols);
    out.write(reinterpret_cast<const char*>(&dtype), sizeof dtype);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    std::vector<float> buf(g.features.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(g.features.data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  {
    std::ofstream out(dir / "labels.tsv");
    for (std::size_t i = 0; i < g.labels.size(); ++i)
      if (g.labels[i] >= 0) out << i << '\t' << g.labels[i] << '\n';
  }
  {
    json splits;
    splits["train"] = bundle.masks.train;
    splits["val"] = bundle.masks.val;
    splits["test"] = bundle.masks.test;
    std::ofstream out(dir / "splits.json");
    out << splits.dump(2) << '\n';
  }
}

std::filesystem::path resolve_dataset_dir(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_directory(direct)) return direct;
  if (const char* root = std::getenv("H2SGNN_DATA_DIR")) {
    const std::filesystem::path under_root = std::filesystem::path(root) / name_or_path;
    if (std::filesystem::is_directory(under_root)) return under_root;
  }
  throw IoError("dataset not found: " + name_or_path +
                " (tried the path itself and $H2SGNN_DATA_DIR)");
}

}  // namespace h2sgnn
