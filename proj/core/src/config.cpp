#include "h2sgnn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "h2sgnn/errors.hpp"

namespace h2sgnn {

using nlohmann::json;

namespace {

FilterBasis basis_from_value(const json& v, const char* key) {
  FilterBasis basis;
  if (v.is_string()) {
    basis.kind = parse_basis_kind(v.get<std::string>());
  } else if (v.is_object()) {
    static const std::set<std::string> allowed = {"kind", "a", "b"};
    for (const auto& item : v.items())
      if (!allowed.count(item.key()))
        throw ConfigError(std::string(key) + ": unknown key '" + item.key() + "'");
    basis.kind = parse_basis_kind(v.at("kind").get<std::string>());
    if (v.contains("a")) basis.a = v["a"].get<double>();
    if (v.contains("b")) basis.b = v["b"].get<double>();
  } else {
    throw ConfigError(std::string(key) + ": expected a basis name or object");
  }
  basis.validate();
  return basis;
}

template <typename T>
T get_as(const json& v, const char* key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": type mismatch");
  }
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const std::set<std::string> known = {
      "dataset",       "metapaths",      "order",        "local_basis",
      "global_basis",  "hidden_dim",     "num_mlp_layers", "dropout",
      "variant",       "materialize_global", "lr",       "weight_decay",
      "epochs",        "patience",       "lr_coeffs",    "wd_coeffs",
      "seeds",         "binarize",       "drop_selfloops",
      "row_normalize_features",          "output_dir"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ConfigError("config: unknown key '" + item.key() + "'");

  ExperimentConfig c;
  if (j.contains("dataset")) c.dataset = get_as<std::string>(j["dataset"], "dataset");
  if (j.contains("metapaths")) {
    if (!j["metapaths"].is_array()) throw ConfigError("metapaths: expected an array");
    for (const json& p : j["metapaths"]) {
      MetaPath path;
      if (p.is_object()) {
        static const std::set<std::string> allowed = {"name", "relations"};
        for (const auto& item : p.items())
          if (!allowed.count(item.key()))
            throw ConfigError("metapaths: unknown key '" + item.key() + "'");
        path.name = get_as<std::string>(p.at("name"), "metapaths.name");
        path.relation_seq =
            get_as<std::vector<std::string>>(p.at("relations"), "metapaths.relations");
      } else {
        throw ConfigError("metapaths: expected objects with name and relations");
      }
      c.model.metapaths.push_back(std::move(path));
    }
  }
  if (j.contains("order")) c.model.order = get_as<int>(j["order"], "order");
  if (j.contains("local_basis")) {
    const json& v = j["local_basis"];
    if (v.is_array()) {
      for (const json& b : v) c.model.local_basis.push_back(basis_from_value(b, "local_basis"));
    } else {
      c.model.local_basis = {basis_from_value(v, "local_basis")};
    }
  } else {
    c.model.local_basis = {FilterBasis{}};
  }
  if (j.contains("global_basis"))
    c.model.global_basis = basis_from_value(j["global_basis"], "global_basis");
  if (j.contains("hidden_dim")) c.model.hidden_dim = get_as<int>(j["hidden_dim"], "hidden_dim");
  if (j.contains("num_mlp_layers"))
    c.model.num_mlp_layers = get_as<int>(j["num_mlp_layers"], "num_mlp_layers");
  if (j.contains("dropout")) c.model.dropout = get_as<double>(j["dropout"], "dropout");
  if (j.contains("variant"))
    c.model.variant = parse_model_variant(get_as<std::string>(j["variant"], "variant"));
  if (j.contains("materialize_global"))
    c.model.materialize_global = get_as<bool>(j["materialize_global"], "materialize_global");

  if (j.contains("lr")) c.hyper.adam.lr = get_as<double>(j["lr"], "lr");
  if (j.contains("weight_decay"))
    c.hyper.adam.weight_decay = get_as<double>(j["weight_decay"], "weight_decay");
  if (j.contains("lr_coeffs")) c.hyper.adam.lr_coeffs = get_as<double>(j["lr_coeffs"], "lr_coeffs");
  if (j.contains("wd_coeffs")) c.hyper.adam.wd_coeffs = get_as<double>(j["wd_coeffs"], "wd_coeffs");
  if (j.contains("epochs")) c.hyper.epochs = get_as<std::int64_t>(j["epochs"], "epochs");
  if (j.contains("patience")) c.hyper.patience = get_as<std::int64_t>(j["patience"], "patience");
  if (j.contains("seeds"))
    c.seeds = get_as<std::vector<std::uint64_t>>(j["seeds"], "seeds");
  if (c.seeds.empty()) throw ConfigError("seeds: at least one seed required");
  if (j.contains("binarize")) c.subgraph.binarize = get_as<bool>(j["binarize"], "binarize");
  if (j.contains("drop_selfloops"))
    c.subgraph.drop_selfloops = get_as<bool>(j["drop_selfloops"], "drop_selfloops");
  if (j.contains("row_normalize_features"))
    c.row_normalize_features =
        get_as<bool>(j["row_normalize_features"], "row_normalize_features");
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

void validate_config_against(const ExperimentConfig& config, const HeteroGraph& graph) {
  for (const MetaPath& path : config.model.metapaths)
    for (const std::string& rel : path.relation_seq)
      if (!graph.has_relation(rel))
        throw ValidationError("config meta-path " + path.name + " names unknown relation '" +
                              rel + "'");
}

}  // namespace h2sgnn
