#include "h2sgnn/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "h2sgnn-checkpoint";
constexpr int kVersion = 1;

json basis_to_json(const FilterBasis& basis) {
  json j;
  j["kind"] = basis_kind_name(basis.kind);
  if (basis.kind == BasisKind::Jacobi) {
    j["a"] = basis.a;
    j["b"] = basis.b;
  }
  return j;
}

FilterBasis basis_from_json(const json& j) {
  FilterBasis basis;
  basis.kind = parse_basis_kind(j.at("kind").get<std::string>());
  if (j.contains("a")) basis.a = j["a"].get<double>();
  if (j.contains("b")) basis.b = j["b"].get<double>();
  return basis;
}

json dense_to_json(const DenseMatrix& m) {
  json j;
  j["shape"] = {m.n_rows, m.n_cols};
  j["data"] = m.data;
  return j;
}

DenseMatrix dense_from_json(const json& j, const char* what) {
  const auto shape = j.at("shape").get<std::vector<idx_t>>();
  if (shape.size() != 2) throw FormatError(std::string("checkpoint: bad shape for ") + what);
  DenseMatrix m(shape[0], shape[1]);
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.data.size())
    throw FormatError(std::string("checkpoint: data length mismatch for ") + what);
  m.data = data;
  return m;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;

  json model;
  model["order"] = checkpoint.model.order;
  model["metapaths"] = json::array();
  for (const MetaPath& p : checkpoint.model.metapaths)
    model["metapaths"].push_back({{"name", p.name}, {"relations", p.relation_seq}});
  model["local_basis"] = json::array();
  for (const FilterBasis& basis : checkpoint.model.local_basis)
    model["local_basis"].push_back(basis_to_json(basis));
  model["global_basis"] = basis_to_json(checkpoint.model.global_basis);
  model["hidden_dim"] = checkpoint.model.hidden_dim;
  model["num_mlp_layers"] = checkpoint.model.num_mlp_layers;
  model["dropout"] = checkpoint.model.dropout;
  model["variant"] = model_variant_name(checkpoint.model.variant);
  model["materialize_global"] = checkpoint.model.materialize_global;
  j["model"] = model;

  j["subgraph"] = {{"binarize", checkpoint.subgraph.binarize},
                   {"drop_selfloops", checkpoint.subgraph.drop_selfloops}};

  json params;
  params["w"] = dense_to_json(checkpoint.params.w);
  params["alpha"] = dense_to_json(checkpoint.params.alpha);
  params["beta"] = checkpoint.params.beta;
  params["gamma"] = checkpoint.params.gamma;
  params["mlp"] = json::array();
  for (const LinearLayer& l : checkpoint.params.mlp)
    params["mlp"].push_back({{"weight", dense_to_json(l.weight)}, {"bias", l.bias}});
  j["params"] = params;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError("checkpoint " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw FormatError("checkpoint: unknown format tag");
    if (j.at("version").get<int>() != kVersion)
      throw FormatError("checkpoint: unsupported version");

    Checkpoint c;
    const json& model = j.at("model");
    c.model.order = model.at("order").get<int>();
    for (const json& p : model.at("metapaths")) {
      MetaPath path_def;
      path_def.name = p.at("name").get<std::string>();
      path_def.relation_seq = p.at("relations").get<std::vector<std::string>>();
      c.model.metapaths.push_back(std::move(path_def));
    }
    for (const json& basis : model.at("local_basis"))
      c.model.local_basis.push_back(basis_from_json(basis));
    c.model.global_basis = basis_from_json(model.at("global_basis"));
    c.model.hidden_dim = model.at("hidden_dim").get<int>();
    c.model.num_mlp_layers = model.at("num_mlp_layers").get<int>();
    c.model.dropout = model.at("dropout").get<double>();
    c.model.variant = parse_model_variant(model.at("variant").get<std::string>());
    c.model.materialize_global = model.at("materialize_global").get<bool>();

    c.subgraph.binarize = j.at("subgraph").at("binarize").get<bool>();
    c.subgraph.drop_selfloops = j.at("subgraph").at("drop_selfloops").get<bool>();

    const json& params = j.at("params");
    c.params.w = dense_from_json(params.at("w"), "w");
    c.params.alpha = dense_from_json(params.at("alpha"), "alpha");
    c.params.beta = params.at("beta").get<std::vector<double>>();
    c.params.gamma = params.at("gamma").get<std::vector<double>>();
    for (const json& l : params.at("mlp")) {
      LinearLayer layer;
      layer.weight = dense_from_json(l.at("weight"), "mlp weight");
      layer.bias = l.at("bias").get<std::vector<double>>();
      c.params.mlp.push_back(std::move(layer));
    }
    if (c.params.mlp.empty()) throw FormatError("checkpoint: no MLP layers");
    try {
      c.params.validate_shapes(c.model, c.params.w.n_rows,
                               static_cast<int>(c.params.mlp.back().weight.n_cols));
    } catch (const Error& e) {
      throw FormatError("checkpoint " + path.string() + ": " + e.what());
    }
    return c;
  } catch (const json::exception& e) {
    throw FormatError("checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace h2sgnn
