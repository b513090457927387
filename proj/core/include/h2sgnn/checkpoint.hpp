#pragma once

#include <filesystem>

#include "h2sgnn/model.hpp"

namespace h2sgnn {

// Versioned JSON container: model configuration (including meta-path
// definitions and subgraph flags) plus every parameter tensor with its
// shape. Layout documented in the README.
struct Checkpoint {
  ModelConfig model;
  SubgraphOptions subgraph;
  ModelParams params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
// Throws FormatError on bad magic, unsupported version or shape mismatches.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace h2sgnn
