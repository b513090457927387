#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "h2sgnn/checkpoint.hpp"
#include "h2sgnn/config.hpp"
#include "h2sgnn/dataio.hpp"
#include "h2sgnn/errors.hpp"
#include "h2sgnn/oracle.hpp"
#include "h2sgnn/synthetic.hpp"
#include "h2sgnn/train.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_verbosity = 0;

void log_info(const std::string& msg) {
  if (g_verbosity >= 1) std::cerr << "[h2sgnn] " << msg << "\n";
}

// Machine-readable results go to --out or stdout, never interleaved with
// logs (those go to stderr).
void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw h2sgnn::IoError("cannot write " + out_path);
    out << payload;
    if (!payload.empty() && payload.back() != '\n') out << '\n';
  }
}

h2sgnn::MetaPath parse_metapath_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= arg.size())
    throw h2sgnn::ArgumentError("expected NAME=rel1,rel2,... got '" + arg + "'");
  h2sgnn::MetaPath path;
  path.name = arg.substr(0, eq);
  std::stringstream rels(arg.substr(eq + 1));
  std::string rel;
  while (std::getline(rels, rel, ','))
    if (!rel.empty()) path.relation_seq.push_back(rel);
  if (path.relation_seq.empty())
    throw h2sgnn::ArgumentError("meta-path " + path.name + " has no relations");
  return path;
}

struct HomophilyArgs {
  std::string data;
  std::vector<std::string> metapaths;
  std::string config_path;
  bool binarize = false;
  bool keep_selfloops = false;
  std::string out;
};

int cmd_homophily(const HomophilyArgs& args) {
  const h2sgnn::DatasetBundle bundle =
      h2sgnn::load_dataset(h2sgnn::resolve_dataset_dir(args.data));
  std::vector<h2sgnn::MetaPath> paths;
  if (!args.config_path.empty()) {
    const h2sgnn::ExperimentConfig cfg = h2sgnn::load_config(args.config_path);
    paths = cfg.model.metapaths;
  }
  for (const std::string& arg : args.metapaths) paths.push_back(parse_metapath_arg(arg));
  if (paths.empty()) throw h2sgnn::ArgumentError("no meta-paths given (--metapath or --config)");

  const h2sgnn::SubgraphOptions opts{args.binarize, !args.keep_selfloops};
  std::ostringstream csv;
  csv << "metapath,homophily_pct\n";
  char buf[32];
  for (const h2sgnn::MetaPath& path : paths) {
    log_info("inducing " + path.name);
    const h2sgnn::MetaPathSubgraph sub = h2sgnn::build_subgraph(bundle.graph, path, opts);
    // Homophily counts structural non-zeros and skips self-loops, so the
    // raw product carries all the information either way.
    const double h = h2sgnn::edge_homophily(sub.raw_adj, bundle.graph.labels);
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * h);
    csv << path.name << ',' << buf << '\n';
  }
  emit(args.out, csv.str());
  return 0;
}

struct TrainArgs {
  std::string config_path;
  std::string data_override;
  std::string out_dir_override;
  std::vector<std::uint64_t> seeds_override;
  std::string out;
};

int cmd_train(const TrainArgs& args) {
  h2sgnn::ExperimentConfig cfg = h2sgnn::load_config(args.config_path);
  if (!args.data_override.empty()) cfg.dataset = args.data_override;
  if (!args.out_dir_override.empty()) cfg.output_dir = args.out_dir_override;
  if (!args.seeds_override.empty()) cfg.seeds = args.seeds_override;
  if (cfg.dataset.empty())
    throw h2sgnn::ConfigError("no dataset given (config 'dataset' key or --data)");

  const h2sgnn::DatasetBundle bundle = h2sgnn::load_dataset(
      h2sgnn::resolve_dataset_dir(cfg.dataset), cfg.row_normalize_features);
  h2sgnn::validate_config_against(cfg, bundle.graph);

  fs::create_directories(cfg.output_dir);
  std::vector<double> micro, macro;
  json per_seed = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    log_info("training seed " + std::to_string(seed));
    h2sgnn::TrainHyper hyper = cfg.hyper;
    hyper.seed = seed;
    const h2sgnn::TrainReport report = h2sgnn::train(bundle, cfg.model, cfg.subgraph, hyper);

    const fs::path report_path =
        fs::path(cfg.output_dir) / ("report_seed" + std::to_string(seed) + ".json");
    std::ofstream rout(report_path);
    rout << h2sgnn::train_report_json(report) << '\n';
    const fs::path ckpt_path =
        fs::path(cfg.output_dir) / ("checkpoint_seed" + std::to_string(seed) + ".json");
    h2sgnn::save_checkpoint(ckpt_path,
                            {cfg.model, cfg.subgraph, report.best_params});

    micro.push_back(report.test_micro_f1);
    macro.push_back(report.test_macro_f1);
    per_seed.push_back({{"seed", seed},
                        {"best_epoch", report.best_epoch},
                        {"epochs_run", report.epochs_run},
                        {"test_micro_f1", report.test_micro_f1},
                        {"test_macro_f1", report.test_macro_f1},
                        {"report", report_path.string()},
                        {"checkpoint", ckpt_path.string()}});
  }

  auto mean_stderr = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sem = xs.size() > 1
                           ? std::sqrt(var / static_cast<double>(xs.size() - 1)) /
                                 std::sqrt(static_cast<double>(xs.size()))
                           : 0.0;
    return std::pair<double, double>(mean, sem);
  };
  const auto [micro_mean, micro_sem] = mean_stderr(micro);
  const auto [macro_mean, macro_sem] = mean_stderr(macro);
  json aggregate;
  aggregate["dataset"] = cfg.dataset;
  aggregate["variant"] = h2sgnn::model_variant_name(cfg.model.variant);
  aggregate["seeds"] = cfg.seeds;
  aggregate["test_micro_f1"] = {{"mean", micro_mean}, {"stderr", micro_sem}};
  aggregate["test_macro_f1"] = {{"mean", macro_mean}, {"stderr", macro_sem}};
  aggregate["runs"] = per_seed;

  std::ofstream aout(fs::path(cfg.output_dir) / "aggregate.json");
  aout << aggregate.dump(2) << '\n';
  emit(args.out, aggregate.dump(2));
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  const h2sgnn::Checkpoint ckpt = h2sgnn::load_checkpoint(args.checkpoint);
  const h2sgnn::DatasetBundle bundle =
      h2sgnn::load_dataset(h2sgnn::resolve_dataset_dir(args.data));

  std::vector<h2sgnn::MetaPathSubgraph> subgraphs;
  for (const h2sgnn::MetaPath& path : ckpt.model.metapaths)
    subgraphs.push_back(h2sgnn::build_subgraph(bundle.graph, path, ckpt.subgraph));
  const h2sgnn::ForwardTrace trace =
      h2sgnn::forward(subgraphs, bundle.graph.features, ckpt.params, ckpt.model,
                      /*train_mode=*/false, nullptr, /*keep_caches=*/false);
  const std::vector<int> preds = h2sgnn::argmax_rows(trace.logits);

  json out;
  auto fill = [&](const char* name, const std::vector<h2sgnn::idx_t>& mask) {
    if (mask.empty()) return;
    out[name] = {
        {"micro_f1", h2sgnn::micro_f1(preds, bundle.graph.labels, mask)},
        {"macro_f1",
         h2sgnn::macro_f1(preds, bundle.graph.labels, mask, bundle.graph.num_classes)},
        {"loss", h2sgnn::cross_entropy_loss(trace.logits, bundle.graph.labels, mask)}};
  };
  fill("train", bundle.masks.train);
  fill("val", bundle.masks.val);
  fill("test", bundle.masks.test);
  emit(args.out, out.dump(2));
  return 0;
}

struct FilterResponseArgs {
  std::string checkpoint;
  int samples = 101;
  bool force_unit_coeffs = false;
  std::string out;
};

int cmd_filter_response(const FilterResponseArgs& args) {
  if (args.samples < 2) throw h2sgnn::ArgumentError("--samples must be >= 2");
  const h2sgnn::Checkpoint ckpt = h2sgnn::load_checkpoint(args.checkpoint);
  const int order = ckpt.model.order;

  std::vector<double> lambdas;
  for (int i = 0; i < args.samples; ++i)
    lambdas.push_back(2.0 * static_cast<double>(i) / static_cast<double>(args.samples - 1));

  std::ostringstream csv;
  csv << "metapath,lambda,response\n";
  char buf[64];
  auto emit_curve = [&](const std::string& name, const h2sgnn::FilterBasis& basis,
                        std::vector<double> coeffs) {
    if (args.force_unit_coeffs) {
      std::fill(coeffs.begin(), coeffs.end(), 0.0);
      coeffs[0] = 1.0;
    }
    for (auto [lambda, h] : h2sgnn::frequency_response(basis, coeffs, lambdas)) {
      std::snprintf(buf, sizeof buf, "%s,%.6f,%.10g", name.c_str(), lambda, h);
      csv << buf << '\n';
    }
  };
  for (int i = 0; i < ckpt.model.num_paths(); ++i) {
    std::vector<double> alpha_row;
    for (int k = 0; k <= order; ++k) alpha_row.push_back(ckpt.params.alpha.at(i, k));
    emit_curve(ckpt.model.metapaths[static_cast<std::size_t>(i)].name, ckpt.model.basis_for(i),
               std::move(alpha_row));
  }
  emit_curve("global", ckpt.model.global_basis, ckpt.params.gamma);
  emit(args.out, csv.str());
  return 0;
}

struct CountParamsArgs {
  std::string variant = "full";
  int relations = 1;
  int order = 0;
  std::string out;
};

int cmd_count_params(const CountParamsArgs& args) {
  const h2sgnn::ParamVariant variant = h2sgnn::parse_variant(args.variant);
  json out;
  out["variant"] = args.variant;
  out["R"] = args.relations;
  out["K"] = args.order;
  out["params"] = h2sgnn::count_params(variant, args.relations, args.order);
  out["items"] = h2sgnn::count_items(variant, args.relations, args.order);
  out["mnc_terms"] = h2sgnn::count_terms_mnc(args.relations, args.order);
  emit(args.out, out.dump(2));
  return 0;
}

struct OracleCheckArgs {
  int relations = 2;
  int order = 3;
  int seeds = 5;
  double tol = 1e-8;
  std::uint64_t base_seed = 0;
  std::string out;
};

int cmd_oracle_check(const OracleCheckArgs& args) {
  const h2sgnn::Prop1Report report = h2sgnn::run_oracle_check(
      args.relations, args.order, args.seeds, args.tol, args.base_seed);
  json out;
  out["R"] = report.num_relations;
  out["K"] = report.order;
  out["tol"] = report.tol;
  out["pass"] = report.pass;
  json per_order;
  double worst = 0.0;
  for (std::size_t k = 0; k < report.max_rel_discrepancy.size(); ++k) {
    per_order[std::to_string(k)] = report.max_rel_discrepancy[k];
    worst = std::max(worst, report.max_rel_discrepancy[k]);
  }
  out["max_rel_discrepancy"] = per_order;
  out["max"] = worst;
  emit(args.out, out.dump(2));
  return report.pass ? 0 : 1;
}

struct MakeFixtureArgs {
  std::string kind = "separable";
  std::string out_dir;
  std::int64_t nodes = 200;
  int classes = 2;
  std::int64_t group_size = 5;
  int het_degree = 5;
  int feature_dim = 8;
  double noise = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_make_fixture(const MakeFixtureArgs& args) {
  if (args.out_dir.empty()) throw h2sgnn::ArgumentError("--out-dir is required");
  h2sgnn::SyntheticSpec spec;
  spec.kind = h2sgnn::parse_fixture_kind(args.kind);
  spec.n_targets = args.nodes;
  spec.num_classes = args.classes;
  spec.group_size = args.group_size;
  spec.het_degree = args.het_degree;
  spec.feature_dim = args.feature_dim;
  spec.noise = args.noise;
  spec.seed = args.seed;
  const h2sgnn::DatasetBundle bundle = h2sgnn::make_fixture(spec);
  h2sgnn::write_dataset(bundle, args.out_dir);

  json out;
  out["dir"] = args.out_dir;
  out["kind"] = args.kind;
  out["nodes"] = bundle.graph.total_nodes();
  out["edges"] = bundle.graph.total_edges();
  out["targets"] = bundle.graph.type_count(bundle.graph.target_type);
  out["train"] = bundle.masks.train.size();
  out["val"] = bundle.masks.val.size();
  out["test"] = bundle.masks.test.size();
  emit(args.out, out.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H2SGNN: spectral GNN for heterogeneous, possibly heterophilic graphs"};
  app.require_subcommand(1);
  app.fallthrough(true);  // --seed/--verbose may follow the subcommand
  app.add_flag("-v,--verbose", g_verbosity, "log progress to stderr (repeat for more)");
  std::uint64_t global_seed = 0;  // accepted everywhere; commands that sample use it
  app.add_option("--seed", global_seed, "seed for commands that draw random numbers");

  HomophilyArgs hom;
  CLI::App* hom_cmd =
      app.add_subcommand("homophily", "edge homophily of meta-path subgraphs (CSV)");
  hom_cmd->add_option("--data", hom.data, "dataset directory or $H2SGNN_DATA_DIR name")
      ->required();
  hom_cmd->add_option("--metapath", hom.metapaths,
                      "meta-path as NAME=rel1,rel2,... (repeatable)");
  hom_cmd->add_option("--config", hom.config_path, "take meta-paths from a config file");
  hom_cmd->add_flag("--binarize", hom.binarize, "binarize path-instance counts");
  hom_cmd->add_flag("--keep-selfloops", hom.keep_selfloops, "keep diagonal entries");
  hom_cmd->add_option("--out", hom.out, "write CSV here instead of stdout");

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "train over the config's seed list");
  train_cmd->add_option("--config", tr.config_path, "experiment config JSON")->required();
  train_cmd->add_option("--data", tr.data_override, "override the config's dataset");
  train_cmd->add_option("--out-dir", tr.out_dir_override, "override the config's output_dir");
  train_cmd->add_option("--seeds", tr.seeds_override, "override the config's seed list");
  train_cmd->add_option("--out", tr.out, "write the aggregate JSON here too");

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "checkpoint JSON")->required();
  eval_cmd->add_option("--data", ev.data, "dataset directory or name")->required();
  eval_cmd->add_option("--out", ev.out, "write metrics JSON here instead of stdout");

  FilterResponseArgs fr;
  CLI::App* fr_cmd = app.add_subcommand(
      "filter-response", "learned filter responses over lambda in [0,2] (CSV)");
  fr_cmd->add_option("--checkpoint", fr.checkpoint, "checkpoint JSON")->required();
  fr_cmd->add_option("--samples", fr.samples, "evenly spaced eigenvalue samples")
      ->default_val(101);
  fr_cmd->add_flag("--force-unit-coeffs", fr.force_unit_coeffs,
                   "debug: replace coefficients with (1,0,...,0)");
  fr_cmd->add_option("--out", fr.out, "write CSV here instead of stdout");

  CountParamsArgs cp;
  CLI::App* cp_cmd =
      app.add_subcommand("count-params", "parameter/term counts of the filter part");
  cp_cmd->add_option("--variant", cp.variant, "pshgcn|local|global|full")->default_val("full");
  cp_cmd->add_option("--relations,-R", cp.relations, "number of meta-path matrices R")
      ->required();
  cp_cmd->add_option("--order,-K", cp.order, "polynomial order K")->required();
  cp_cmd->add_option("--out", cp.out, "write JSON here instead of stdout");

  OracleCheckArgs oc;
  CLI::App* oc_cmd = app.add_subcommand(
      "oracle-check", "numeric equivalence of global filtering and the word expansion");
  oc_cmd->add_option("--relations,-R", oc.relations, "number of matrices R")->required();
  oc_cmd->add_option("--order,-K", oc.order, "maximum order K")->required();
  oc_cmd->add_option("--seeds", oc.seeds, "random instances to try")->default_val(5);
  oc_cmd->add_option("--tol", oc.tol, "max relative discrepancy")->default_val(1e-8);
  oc_cmd->add_option("--out", oc.out, "write JSON here instead of stdout");

  MakeFixtureArgs mf;
  CLI::App* mf_cmd =
      app.add_subcommand("make-fixture", "write a synthetic dataset for tests and demos");
  mf_cmd->add_option("--kind", mf.kind, "separable|uniform-label|chain4")
      ->default_val("separable");
  mf_cmd->add_option("--out-dir", mf.out_dir, "dataset directory to create")->required();
  mf_cmd->add_option("--nodes", mf.nodes, "target node count")->default_val(200);
  mf_cmd->add_option("--classes", mf.classes, "number of classes")->default_val(2);
  mf_cmd->add_option("--group-size", mf.group_size, "items per homophilic hub")
      ->default_val(5);
  mf_cmd->add_option("--het-degree", mf.het_degree, "mixed hubs per item")->default_val(5);
  mf_cmd->add_option("--feature-dim", mf.feature_dim, "feature dimension")->default_val(8);
  mf_cmd->add_option("--noise", mf.noise, "feature noise sigma")->default_val(1.0);
  mf_cmd->add_option("--out", mf.out, "write summary JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    mf.seed = global_seed;
    oc.base_seed = global_seed;
    if (hom_cmd->parsed()) return cmd_homophily(hom);
    if (train_cmd->parsed()) return cmd_train(tr);
    if (eval_cmd->parsed()) return cmd_eval(ev);
    if (fr_cmd->parsed()) return cmd_filter_response(fr);
    if (cp_cmd->parsed()) return cmd_count_params(cp);
    if (oc_cmd->parsed()) return cmd_oracle_check(oc);
    if (mf_cmd->parsed()) return cmd_make_fixture(mf);
  } catch (const h2sgnn::ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const h2sgnn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
