#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "h2sgnn/filters.hpp"
#include "h2sgnn/hetgraph.hpp"

namespace h2sgnn {

enum class Variant { Full, LocalOnly, GlobalOnly };

Variant parse_model_variant(const std::string& name);
std::string model_variant_name(Variant variant);

struct ModelConfig {
  int order = 10;                        // polynomial order K
  std::vector<MetaPath> metapaths;       // R entries
  std::vector<FilterBasis> local_basis;  // one shared entry or one per meta-path
  FilterBasis global_basis;
  int hidden_dim = 64;
  int num_mlp_layers = 2;
  double dropout = 0.5;
  Variant variant = Variant::Full;
  // Build the beta-weighted adjacency sum explicitly instead of applying it
  // lazily; only sensible for small graphs.
  bool materialize_global = false;

  int num_paths() const { return static_cast<int>(metapaths.size()); }
  const FilterBasis& basis_for(int path_index) const;
  void validate() const;
};

struct LinearLayer {
  DenseMatrix weight;
  std::vector<double> bias;
};

// All learnable tensors. alpha is R x (K+1): one local coefficient row per
// meta-path. gamma has K+1 entries, beta one per meta-path.
struct ModelParams {
  DenseMatrix w;  // d x hidden_dim feature map, shared by both branches
  DenseMatrix alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<LinearLayer> mlp;  // last layer ends in num_classes outputs

  bool all_finite() const;
  void validate_shapes(const ModelConfig& config, idx_t feature_dim, int num_classes) const;
};

// Coefficients start as the decaying low-pass profile delta * (1-delta)^k
// with the K-th entry taking the residual mass so each row sums to one;
// beta starts uniform at 1/R; weights are fan-in-scaled uniform.
ModelParams init_params(const ModelConfig& config, idx_t feature_dim, int num_classes,
                        std::mt19937_64& rng, double delta = 0.5);

// v -> sum_i beta[i] * (norm_adj_i v), applied lazily.
LinearOp global_operator(std::span<const MetaPathSubgraph> subgraphs,
                         std::span<const double> beta);
CsrMatrix materialize_global_adjacency(std::span<const MetaPathSubgraph> subgraphs,
                                       std::span<const double> beta);

struct ForwardTrace {
  DenseMatrix z_local;   // zero matrix when the variant disables the branch
  DenseMatrix z_global;
  DenseMatrix z;
  DenseMatrix logits;

  // Caches for backward(). The trace borrows the subgraphs and input
  // features; both must outlive it.
  bool has_caches = false;
  bool train_mode = false;
  double dropout = 0.0;
  const std::vector<MetaPathSubgraph>* subgraphs = nullptr;
  const DenseMatrix* x = nullptr;
  DenseMatrix xw;
  std::vector<BasisStack> local_stacks;
  BasisStack global_stack;
  std::vector<DenseMatrix> mlp_inputs;    // post-dropout input of each layer
  std::vector<DenseMatrix> mlp_preacts;   // pre-activation output of each layer
  std::vector<std::vector<std::uint8_t>> dropout_masks;  // [0] on z, then per hidden
};

// Z_l = sum_i sum_k alpha[i][k] h_{i,k}(A_i) X W
DenseMatrix local_filtering(const std::vector<MetaPathSubgraph>& subgraphs, const DenseMatrix& x,
                            const ModelParams& params, const ModelConfig& config);
// Z_g = sum_k gamma[k] g_k(sum_i beta[i] A_i) X W
DenseMatrix global_filtering(const std::vector<MetaPathSubgraph>& subgraphs, const DenseMatrix& x,
                             const ModelParams& params, const ModelConfig& config);

// Full forward pass: branch combination, MLP head with rectified-linear
// units, dropout on Z and hidden activations in train mode. rng is required
// only when train_mode and dropout > 0.
ForwardTrace forward(const std::vector<MetaPathSubgraph>& subgraphs, const DenseMatrix& x,
                     const ModelParams& params, const ModelConfig& config, bool train_mode,
                     std::mt19937_64* rng = nullptr, bool keep_caches = true);

// Mean over the mask of -log softmax(logits)_label.
double cross_entropy_loss(const DenseMatrix& logits, std::span<const int> labels,
                          std::span<const idx_t> mask);

}  // namespace h2sgnn
