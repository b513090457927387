#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "h2sgnn/model.hpp"
#include "h2sgnn/train.hpp"

namespace h2sgnn {

// Everything a training run needs, resolved from a JSON file with defaults
// applied. Key set documented in the README; unknown keys are rejected.
struct ExperimentConfig {
  std::string dataset;  // path or $H2SGNN_DATA_DIR name
  ModelConfig model;
  SubgraphOptions subgraph;
  TrainHyper hyper;  // seed field unused; seeds below drive the runs
  std::vector<std::uint64_t> seeds = {0};
  bool row_normalize_features = false;
  std::string output_dir = "runs";
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const std::string& text);

// Rejects meta-paths over relations the dataset does not declare.
void validate_config_against(const ExperimentConfig& config, const HeteroGraph& graph);

}  // namespace h2sgnn
