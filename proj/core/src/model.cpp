#include "h2sgnn/model.hpp"

#include <algorithm>
#include <cmath>

#include "h2sgnn/errors.hpp"
#include "h2sgnn/rng.hpp"

namespace h2sgnn {

Variant parse_model_variant(const std::string& name) {
  if (name == "full") return Variant::Full;
  if (name == "local_only") return Variant::LocalOnly;
  if (name == "global_only") return Variant::GlobalOnly;
  throw ArgumentError("unknown variant: " + name + " (expected full|local_only|global_only)");
}

std::string model_variant_name(Variant variant) {
  switch (variant) {
    case Variant::Full: return "full";
    case Variant::LocalOnly: return "local_only";
    case Variant::GlobalOnly: return "global_only";
  }
  throw ArgumentError("invalid variant");
}

const FilterBasis& ModelConfig::basis_for(int path_index) const {
  if (local_basis.empty()) throw ArgumentError("ModelConfig: no local basis configured");
  if (local_basis.size() == 1) return local_basis.front();
  return local_basis.at(static_cast<std::size_t>(path_index));
}

void ModelConfig::validate() const {
  if (order < 0) throw ArgumentError("ModelConfig: order must be >= 0");
  if (metapaths.empty()) throw ArgumentError("ModelConfig: at least one meta-path required");
  if (local_basis.size() != 1 && local_basis.size() != metapaths.size())
    throw ArgumentError("ModelConfig: local_basis must be shared or one per meta-path");
  for (const FilterBasis& basis : local_basis) basis.validate();
  global_basis.validate();
  if (hidden_dim < 1) throw ArgumentError("ModelConfig: hidden_dim must be >= 1");
  if (num_mlp_layers < 1) throw ArgumentError("ModelConfig: num_mlp_layers must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ArgumentError("ModelConfig: dropout must be in [0,1)");
}

bool ModelParams::all_finite() const {
  if (!w.all_finite() || !alpha.all_finite()) return false;
  for (double v : beta)
    if (!std::isfinite(v)) return false;
  for (double v : gamma)
    if (!std::isfinite(v)) return false;
  for (const LinearLayer& l : mlp) {
    if (!l.weight.all_finite()) return false;
    for (double v : l.bias)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

void ModelParams::validate_shapes(const ModelConfig& config, idx_t feature_dim,
                                  int num_classes) const {
  const int R = config.num_paths();
  const int K1 = config.order + 1;
  if (w.n_rows != feature_dim || w.n_cols != config.hidden_dim)
    throw ShapeError("params: w shape mismatch");
  if (alpha.n_rows != R || alpha.n_cols != K1) throw ShapeError("params: alpha shape mismatch");
  if (static_cast<int>(beta.size()) != R) throw ShapeError("params: beta length mismatch");
  if (static_cast<int>(gamma.size()) != K1) throw ShapeError("params: gamma length mismatch");
  if (static_cast<int>(mlp.size()) != config.num_mlp_layers)
    throw ShapeError("params: mlp layer count mismatch");
  idx_t in_dim = config.hidden_dim;
  for (std::size_t l = 0; l < mlp.size(); ++l) {
    const idx_t out_dim = l + 1 == mlp.size() ? num_classes : config.hidden_dim;
    if (mlp[l].weight.n_rows != in_dim || mlp[l].weight.n_cols != out_dim)
      throw ShapeError("params: mlp weight shape mismatch at layer " + std::to_string(l));
    if (static_cast<idx_t>(mlp[l].bias.size()) != out_dim)
      throw ShapeError("params: mlp bias length mismatch at layer " + std::to_string(l));
    in_dim = out_dim;
  }
  if (!all_finite()) throw ArgumentError("params: non-finite entry");
}

namespace {

void fill_fanin_uniform(DenseMatrix& w, std::mt19937_64& rng) {
  const double bound = w.n_rows > 0 ? 1.0 / std::sqrt(static_cast<double>(w.n_rows)) : 1.0;
  for (double& v : w.data) v = uniform(rng, -bound, bound);
}

}  // namespace

ModelParams init_params(const ModelConfig& config, idx_t feature_dim, int num_classes,
                        std::mt19937_64& rng, double delta) {
  config.validate();
  const int R = config.num_paths();
  const int K = config.order;
  ModelParams p;
  p.w = DenseMatrix(feature_dim, config.hidden_dim);
  fill_fanin_uniform(p.w, rng);

  // delta (1-delta)^k decays toward zero; the last entry takes the residual
  // so every coefficient row sums to one.
  std::vector<double> profile(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k < K; ++k) profile[static_cast<std::size_t>(k)] = delta * std::pow(1.0 - delta, k);
  profile[static_cast<std::size_t>(K)] = std::pow(1.0 - delta, K);

  p.alpha = DenseMatrix(R, K + 1);
  for (int i = 0; i < R; ++i)
    for (int k = 0; k <= K; ++k) p.alpha.at(i, k) = profile[static_cast<std::size_t>(k)];
  p.gamma = profile;
  p.beta.assign(static_cast<std::size_t>(R), 1.0 / static_cast<double>(R));

  idx_t in_dim = config.hidden_dim;
  for (int l = 0; l < config.num_mlp_layers; ++l) {
    const idx_t out_dim = l + 1 == config.num_mlp_layers ? num_classes : config.hidden_dim;
    LinearLayer layer;
    layer.weight = DenseMatrix(in_dim, out_dim);
    fill_fanin_uniform(layer.weight, rng);
    layer.bias.assign(static_cast<std::size_t>(out_dim), 0.0);
    p.mlp.push_back(std::move(layer));
    in_dim = out_dim;
  }
  return p;
}

LinearOp global_operator(std::span<const MetaPathSubgraph> subgraphs,
                         std::span<const double> beta) {
  if (subgraphs.empty()) throw ArgumentError("global_operator: no subgraphs");
  if (subgraphs.size() != beta.size())
    throw ArgumentError("global_operator: beta length != subgraph count");
  const idx_t n = subgraphs[0].norm_adj.n_rows;
  for (const MetaPathSubgraph& s : subgraphs)
    if (s.norm_adj.n_rows != n || s.norm_adj.n_cols != n)
      throw ShapeError("global_operator: subgraph adjacency shapes differ");
  std::vector<const CsrMatrix*> mats;
  std::vector<double> weights(beta.begin(), beta.end());
  for (const MetaPathSubgraph& s : subgraphs) mats.push_back(&s.norm_adj);
  return [mats = std::move(mats), weights = std::move(weights)](const DenseMatrix& v) {
    DenseMatrix out(v.n_rows, v.n_cols);
    for (std::size_t i = 0; i < mats.size(); ++i) axpy(weights[i], spmm(*mats[i], v), out);
    return out;
  };
}

CsrMatrix materialize_global_adjacency(std::span<const MetaPathSubgraph> subgraphs,
                                       std::span<const double> beta) {
  std::vector<const CsrMatrix*> mats;
  for (const MetaPathSubgraph& s : subgraphs) mats.push_back(&s.norm_adj);
  return add_scaled(std::span<const CsrMatrix* const>(mats), beta);
}

namespace {

DenseMatrix map_features(const DenseMatrix& x, const ModelParams& params) {
  return matmul(x, params.w);
}

BasisStack propagate_local(const MetaPathSubgraph& subgraph, const FilterBasis& basis,
                           const DenseMatrix& xw, int order) {
  const CsrMatrix* adj = &subgraph.norm_adj;
  return propagate_basis(basis, [adj](const DenseMatrix& v) { return spmm(*adj, v); }, xw, order);
}

std::vector<double> alpha_row(const ModelParams& params, int i) {
  std::vector<double> row(static_cast<std::size_t>(params.alpha.n_cols));
  for (idx_t k = 0; k < params.alpha.n_cols; ++k) row[static_cast<std::size_t>(k)] = params.alpha.at(i, k);
  return row;
}

void apply_dropout(DenseMatrix& m, double p, std::mt19937_64& rng,
                   std::vector<std::uint8_t>& mask_out) {
  mask_out.resize(m.data.size());
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const bool keep = uniform_unit(rng) >= p;
    mask_out[i] = keep ? 1 : 0;
    m.data[i] = keep ? m.data[i] * keep_scale : 0.0;
  }
}

}  // namespace

DenseMatrix local_filtering(const std::vector<MetaPathSubgraph>& subgraphs, const DenseMatrix& x,
                            const ModelParams& params, const ModelConfig& config) {
  config.validate();
  if (static_cast<int>(subgraphs.size()) != config.num_paths())
    throw ShapeError("local_filtering: subgraph count != configured meta-paths");
  const DenseMatrix xw = map_features(x, params);
  DenseMatrix z(xw.n_rows, xw.n_cols);
  for (std::size_t i = 0; i < subgraphs.size(); ++i) {
    const BasisStack stack =
        propagate_local(subgraphs[i], config.basis_for(static_cast<int>(i)), xw, config.order);
    axpy(1.0, contract_stack(stack, alpha_row(params, static_cast<int>(i))), z);
  }
  return z;
}

DenseMatrix global_filtering(const std::vector<MetaPathSubgraph>& subgraphs, const DenseMatrix& x,
                             const ModelParams& params, const ModelConfig& config) {
  config.validate();
  if (static_cast<int>(subgraphs.size()) != config.num_paths())
    throw ShapeError("global_filtering: subgraph count != configured meta-paths");
  const DenseMatrix xw = map_features(x, params);
  LinearOp op;
  if (config.materialize_global) {
    CsrMatrix global = materialize_global_adjacency(subgraphs, params.beta);
    op = [global = std::move(global)](const DenseMatrix& v) { return spmm(global, v); };
  } else {
    op = global_operator(subgraphs, params.beta);
  }
  const BasisStack stack = propagate_basis(config.global_basis, op, xw, config.order);
  return contract_stack(stack, params.gamma);
}

ForwardTrace forward(const std::vector<MetaPathSubgraph>& subgraphs, const DenseMatrix& x,
                     const ModelParams& params, const ModelConfig& config, bool train_mode,
                     std::mt19937_64* rng, bool keep_caches) {
  config.validate();
  if (static_cast<int>(subgraphs.size()) != config.num_paths())
    throw ShapeError("forward: subgraph count != configured meta-paths");
  const bool with_dropout = train_mode && config.dropout > 0.0;
  if (with_dropout && rng == nullptr)
    throw ArgumentError("forward: dropout in train mode needs an rng");

  ForwardTrace trace;
  trace.train_mode = train_mode;
  trace.dropout = with_dropout ? config.dropout : 0.0;
  trace.has_caches = keep_caches;
  if (keep_caches) {
    trace.subgraphs = &subgraphs;
    trace.x = &x;
  }

  const DenseMatrix xw = map_features(x, params);
  const bool local_active = config.variant != Variant::GlobalOnly;
  const bool global_active = config.variant != Variant::LocalOnly;

  trace.z_local = DenseMatrix(xw.n_rows, xw.n_cols);
  trace.z_global = DenseMatrix(xw.n_rows, xw.n_cols);

  if (local_active) {
    for (std::size_t i = 0; i < subgraphs.size(); ++i) {
      BasisStack stack =
          propagate_local(subgraphs[i], config.basis_for(static_cast<int>(i)), xw, config.order);
      axpy(1.0, contract_stack(stack, alpha_row(params, static_cast<int>(i))), trace.z_local);
      if (keep_caches) trace.local_stacks.push_back(std::move(stack));
    }
  }
  if (global_active) {
    LinearOp op;
    if (config.materialize_global) {
      CsrMatrix global = materialize_global_adjacency(subgraphs, params.beta);
      op = [global = std::move(global)](const DenseMatrix& v) { return spmm(global, v); };
    } else {
      op = global_operator(subgraphs, params.beta);
    }
    BasisStack stack = propagate_basis(config.global_basis, op, xw, config.order);
    trace.z_global = contract_stack(stack, params.gamma);
    if (keep_caches) trace.global_stack = std::move(stack);
  }

  switch (config.variant) {
    case Variant::Full: trace.z = add(trace.z_local, trace.z_global); break;
    case Variant::LocalOnly: trace.z = trace.z_local; break;
    case Variant::GlobalOnly: trace.z = trace.z_global; break;
  }

  // MLP head. Dropout sits on Z and on each hidden activation.
  DenseMatrix h = trace.z;
  if (with_dropout) {
    trace.dropout_masks.emplace_back();
    apply_dropout(h, config.dropout, *rng, trace.dropout_masks.back());
  }
  for (std::size_t l = 0; l < params.mlp.size(); ++l) {
    if (keep_caches) trace.mlp_inputs.push_back(h);
    DenseMatrix preact = matmul(h, params.mlp[l].weight);
    for (idx_t i = 0; i < preact.n_rows; ++i)
      for (idx_t j = 0; j < preact.n_cols; ++j)
        preact.at(i, j) += params.mlp[l].bias[static_cast<std::size_t>(j)];
    if (keep_caches) trace.mlp_preacts.push_back(preact);
    if (l + 1 < params.mlp.size()) {
      for (double& v : preact.data) v = v > 0.0 ? v : 0.0;  // relu
      if (with_dropout) {
        trace.dropout_masks.emplace_back();
        apply_dropout(preact, config.dropout, *rng, trace.dropout_masks.back());
      }
      h = std::move(preact);
    } else {
      trace.logits = std::move(preact);
    }
  }
  if (keep_caches) trace.xw = xw;
  return trace;
}

double cross_entropy_loss(const DenseMatrix& logits, std::span<const int> labels,
                          std::span<const idx_t> mask) {
  if (mask.empty()) throw ArgumentError("cross_entropy_loss: empty mask");
  if (static_cast<idx_t>(labels.size()) != logits.n_rows)
    throw ShapeError("cross_entropy_loss: label count != logit rows");
  double total = 0.0;
  for (idx_t id : mask) {
    if (id < 0 || id >= logits.n_rows)
      throw ArgumentError("cross_entropy_loss: mask id out of range");
    const int y = labels[static_cast<std::size_t>(id)];
    if (y < 0 || y >= static_cast<int>(logits.n_cols))
      throw ArgumentError("cross_entropy_loss: node " + std::to_string(id) +
                          " has no valid label");
    const auto row = logits.row(id);
    double m = row[0];
    for (double v : row) m = std::max(m, v);
    double lse = 0.0;
    for (double v : row) lse += std::exp(v - m);
    lse = m + std::log(lse);
    total += lse - row[static_cast<std::size_t>(y)];
  }
  return total / static_cast<double>(mask.size());
}

}  // namespace h2sgnn
