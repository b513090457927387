#include "h2sgnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

#include "h2sgnn/errors.hpp"
#include "h2sgnn/rng.hpp"

namespace h2sgnn {

namespace {

// Reverse sweep of one basis recurrence. `grads` enters holding the seed
// gradient of every cached term and is consumed in place; the return value
// is the gradient with respect to terms[0]. `apply_t` computes M^T v.
// `on_apply`, when set, is invoked once per forward application of M with
// (gradient of the application's output, the panel it was applied to) so the
// caller can accumulate gradients of the operator's own parameters.
DenseMatrix reverse_stack(
    const FilterBasis& basis, const BasisStack& stack, std::vector<DenseMatrix> grads,
    const LinearOp& apply_t,
    const std::function<void(const DenseMatrix&, const DenseMatrix&)>& on_apply) {
  const int order = stack.order;
  for (int k = order; k >= 2; --k) {
    const RecurrenceStep s = recurrence_step(basis, k);
    DenseMatrix& gk = grads[static_cast<std::size_t>(k)];
    DenseMatrix scaled_gk = s.c_x == 1.0 ? gk : scaled(gk, s.c_x);
    if (on_apply) on_apply(scaled_gk, stack.terms[static_cast<std::size_t>(k) - 1]);
    axpy(1.0, apply_t(scaled_gk), grads[static_cast<std::size_t>(k) - 1]);
    if (s.c_one != 0.0) axpy(s.c_one, gk, grads[static_cast<std::size_t>(k) - 1]);
    if (s.c_prev != 0.0) axpy(-s.c_prev, gk, grads[static_cast<std::size_t>(k) - 2]);
  }
  if (order >= 1) {
    double seed_one = 0.0, seed_x = 0.0;
    seed_coeffs(basis, seed_one, seed_x);
    DenseMatrix& g1 = grads[1];
    DenseMatrix scaled_g1 = seed_x == 1.0 ? g1 : scaled(g1, seed_x);
    if (on_apply) on_apply(scaled_g1, stack.terms[0]);
    axpy(1.0, apply_t(scaled_g1), grads[0]);
    if (seed_one != 0.0) axpy(seed_one, g1, grads[0]);
  }
  return std::move(grads[0]);
}

std::vector<double> column_sums(const DenseMatrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.n_cols), 0.0);
  for (idx_t i = 0; i < m.n_rows; ++i)
    for (idx_t j = 0; j < m.n_cols; ++j) out[static_cast<std::size_t>(j)] += m.at(i, j);
  return out;
}

void dropout_backward(DenseMatrix& grad, const std::vector<std::uint8_t>& mask, double p) {
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < grad.data.size(); ++i)
    grad.data[i] = mask[i] ? grad.data[i] * keep_scale : 0.0;
}

}  // namespace

Gradients backward(const ForwardTrace& trace, std::span<const int> labels,
                   std::span<const idx_t> mask, const ModelParams& params,
                   const ModelConfig& config) {
  if (!trace.has_caches)
    throw StateError("backward: trace was produced without caches");
  if (mask.empty()) throw ArgumentError("backward: empty mask");

  const std::vector<MetaPathSubgraph>& subgraphs = *trace.subgraphs;
  const int order = config.order;
  const bool local_active = config.variant != Variant::GlobalOnly;
  const bool global_active = config.variant != Variant::LocalOnly;
  const bool with_dropout = trace.dropout > 0.0;

  Gradients g;
  g.w = DenseMatrix(params.w.n_rows, params.w.n_cols);
  g.alpha = DenseMatrix(params.alpha.n_rows, params.alpha.n_cols);
  g.beta.assign(params.beta.size(), 0.0);
  g.gamma.assign(params.gamma.size(), 0.0);
  for (const LinearLayer& l : params.mlp) {
    LinearLayer lg;
    lg.weight = DenseMatrix(l.weight.n_rows, l.weight.n_cols);
    lg.bias.assign(l.bias.size(), 0.0);
    g.mlp.push_back(std::move(lg));
  }

  // d loss / d logits = (softmax - onehot) / |mask| on masked rows.
  DenseMatrix dlogits(trace.logits.n_rows, trace.logits.n_cols);
  const double inv_count = 1.0 / static_cast<double>(mask.size());
  for (idx_t id : mask) {
    const auto row = trace.logits.row(id);
    double m = row[0];
    for (double v : row) m = std::max(m, v);
    double z = 0.0;
    for (double v : row) z += std::exp(v - m);
    for (idx_t j = 0; j < trace.logits.n_cols; ++j)
      dlogits.at(id, j) = std::exp(row[static_cast<std::size_t>(j)] - m) / z * inv_count;
    dlogits.at(id, labels[static_cast<std::size_t>(id)]) -= inv_count;
  }

  // MLP head, last layer first.
  DenseMatrix dcur = std::move(dlogits);
  const int n_layers = static_cast<int>(params.mlp.size());
  for (int l = n_layers - 1; l >= 0; --l) {
    g.mlp[static_cast<std::size_t>(l)].weight =
        matmul_tn(trace.mlp_inputs[static_cast<std::size_t>(l)], dcur);
    g.mlp[static_cast<std::size_t>(l)].bias = column_sums(dcur);
    DenseMatrix dinput = matmul_nt(dcur, params.mlp[static_cast<std::size_t>(l)].weight);
    if (l > 0) {
      if (with_dropout)
        dropout_backward(dinput, trace.dropout_masks[static_cast<std::size_t>(l)], trace.dropout);
      const DenseMatrix& preact = trace.mlp_preacts[static_cast<std::size_t>(l) - 1];
      for (std::size_t i = 0; i < dinput.data.size(); ++i)
        if (preact.data[i] <= 0.0) dinput.data[i] = 0.0;
    }
    dcur = std::move(dinput);
  }
  DenseMatrix dz = std::move(dcur);
  if (with_dropout) dropout_backward(dz, trace.dropout_masks[0], trace.dropout);

  // Z = Z_l + Z_g: both branches see the same upstream gradient.
  DenseMatrix dxw(trace.xw.n_rows, trace.xw.n_cols);

  if (local_active) {
    for (std::size_t i = 0; i < subgraphs.size(); ++i) {
      const BasisStack& stack = trace.local_stacks[i];
      std::vector<DenseMatrix> seeds;
      seeds.reserve(static_cast<std::size_t>(order) + 1);
      for (int k = 0; k <= order; ++k) {
        g.alpha.at(static_cast<idx_t>(i), k) =
            frob_dot(dz, stack.terms[static_cast<std::size_t>(k)]);
        seeds.push_back(scaled(dz, params.alpha.at(static_cast<idx_t>(i), k)));
      }
      const CsrMatrix* adj = &subgraphs[i].norm_adj;
      LinearOp apply_t = [adj](const DenseMatrix& v) { return spmm_transposed(*adj, v); };
      axpy(1.0,
           reverse_stack(config.basis_for(static_cast<int>(i)), stack, std::move(seeds), apply_t,
                         nullptr),
           dxw);
    }
  }
  if (global_active) {
    const BasisStack& stack = trace.global_stack;
    std::vector<DenseMatrix> seeds;
    seeds.reserve(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
      g.gamma[static_cast<std::size_t>(k)] =
          frob_dot(dz, stack.terms[static_cast<std::size_t>(k)]);
      seeds.push_back(scaled(dz, params.gamma[static_cast<std::size_t>(k)]));
    }
    LinearOp apply_t = [&](const DenseMatrix& v) {
      DenseMatrix out(v.n_rows, v.n_cols);
      for (std::size_t i = 0; i < subgraphs.size(); ++i)
        axpy(params.beta[i], spmm_transposed(subgraphs[i].norm_adj, v), out);
      return out;
    };
    // Every forward application of the operator contributes
    // d beta_i += <upstream, A_i panel>.
    auto on_apply = [&](const DenseMatrix& upstream, const DenseMatrix& panel) {
      for (std::size_t i = 0; i < subgraphs.size(); ++i)
        g.beta[i] += frob_dot(upstream, spmm(subgraphs[i].norm_adj, panel));
    };
    axpy(1.0, reverse_stack(config.global_basis, stack, std::move(seeds), apply_t, on_apply),
         dxw);
  }

  g.w = matmul_tn(*trace.x, dxw);
  return g;
}

AdamState AdamState::zeros_like(const ModelParams& params) {
  AdamState s;
  auto zero = [](const ModelParams& p) {
    ModelParams z;
    z.w = DenseMatrix(p.w.n_rows, p.w.n_cols);
    z.alpha = DenseMatrix(p.alpha.n_rows, p.alpha.n_cols);
    z.beta.assign(p.beta.size(), 0.0);
    z.gamma.assign(p.gamma.size(), 0.0);
    for (const LinearLayer& l : p.mlp) {
      LinearLayer zl;
      zl.weight = DenseMatrix(l.weight.n_rows, l.weight.n_cols);
      zl.bias.assign(l.bias.size(), 0.0);
      z.mlp.push_back(std::move(zl));
    }
    return z;
  };
  s.m = zero(params);
  s.v = zero(params);
  return s;
}

namespace {

struct TensorView {
  const char* name;
  double* param;
  const double* grad;
  double* m;
  double* v;
  std::size_t size;
  bool is_coeff;  // alpha/beta/gamma get the optional per-group overrides
};

void adam_update(const TensorView& t, const AdamHyper& hyper, double bias1, double bias2) {
  const double lr = t.is_coeff && hyper.lr_coeffs >= 0.0 ? hyper.lr_coeffs : hyper.lr;
  const double wd =
      t.is_coeff && hyper.wd_coeffs >= 0.0 ? hyper.wd_coeffs : hyper.weight_decay;
  for (std::size_t i = 0; i < t.size; ++i) {
    const double gi = t.grad[i];
    if (!std::isfinite(gi))
      throw ArgumentError(std::string("adam_step: non-finite gradient in ") + t.name);
    t.m[i] = hyper.beta1 * t.m[i] + (1.0 - hyper.beta1) * gi;
    t.v[i] = hyper.beta2 * t.v[i] + (1.0 - hyper.beta2) * gi * gi;
    const double mhat = t.m[i] / bias1;
    const double vhat = t.v[i] / bias2;
    t.param[i] -= lr * (mhat / (std::sqrt(vhat) + hyper.eps) + wd * t.param[i]);
  }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamHyper& hyper, Variant variant) {
  state.step += 1;
  const double bias1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));

  std::vector<TensorView> views;
  views.push_back({"w", params.w.data.data(), grads.w.data.data(), state.m.w.data.data(),
                   state.v.w.data.data(), params.w.data.size(), false});
  if (variant != Variant::GlobalOnly)
    views.push_back({"alpha", params.alpha.data.data(), grads.alpha.data.data(),
                     state.m.alpha.data.data(), state.v.alpha.data.data(),
                     params.alpha.data.size(), true});
  if (variant != Variant::LocalOnly) {
    views.push_back({"beta", params.beta.data(), grads.beta.data(), state.m.beta.data(),
                     state.v.beta.data(), params.beta.size(), true});
    views.push_back({"gamma", params.gamma.data(), grads.gamma.data(), state.m.gamma.data(),
                     state.v.gamma.data(), params.gamma.size(), true});
  }
  for (std::size_t l = 0; l < params.mlp.size(); ++l) {
    views.push_back({"mlp.weight", params.mlp[l].weight.data.data(),
                     grads.mlp[l].weight.data.data(), state.m.mlp[l].weight.data.data(),
                     state.v.mlp[l].weight.data.data(), params.mlp[l].weight.data.size(), false});
    views.push_back({"mlp.bias", params.mlp[l].bias.data(), grads.mlp[l].bias.data(),
                     state.m.mlp[l].bias.data(), state.v.mlp[l].bias.data(),
                     params.mlp[l].bias.size(), false});
  }
  for (const TensorView& t : views) adam_update(t, hyper, bias1, bias2);
}

std::vector<int> argmax_rows(const DenseMatrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.n_rows), 0);
  for (idx_t i = 0; i < logits.n_rows; ++i) {
    const auto row = logits.row(i);
    int best = 0;
    for (int j = 1; j < static_cast<int>(row.size()); ++j)
      if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(best)]) best = j;
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double micro_f1(std::span<const int> preds, std::span<const int> labels,
                std::span<const idx_t> mask) {
  if (mask.empty()) throw ArgumentError("micro_f1: empty mask");
  idx_t correct = 0;
  for (idx_t id : mask)
    if (preds[static_cast<std::size_t>(id)] == labels[static_cast<std::size_t>(id)]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

double macro_f1(std::span<const int> preds, std::span<const int> labels,
                std::span<const idx_t> mask, int num_classes) {
  if (mask.empty()) throw ArgumentError("macro_f1: empty mask");
  if (num_classes < 1) throw ArgumentError("macro_f1: num_classes must be >= 1");
  std::vector<idx_t> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<idx_t> fp(static_cast<std::size_t>(num_classes), 0);
  std::vector<idx_t> fn(static_cast<std::size_t>(num_classes), 0);
  for (idx_t id : mask) {
    const int p = preds[static_cast<std::size_t>(id)];
    const int y = labels[static_cast<std::size_t>(id)];
    if (p == y) {
      ++tp[static_cast<std::size_t>(p)];
    } else {
      if (p >= 0 && p < num_classes) ++fp[static_cast<std::size_t>(p)];
      ++fn[static_cast<std::size_t>(y)];
    }
  }
  double total = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double denom_p = static_cast<double>(tp[static_cast<std::size_t>(c)] +
                                               fp[static_cast<std::size_t>(c)]);
    const double denom_r = static_cast<double>(tp[static_cast<std::size_t>(c)] +
                                               fn[static_cast<std::size_t>(c)]);
    const double prec = denom_p > 0.0 ? tp[static_cast<std::size_t>(c)] / denom_p : 0.0;
    const double rec = denom_r > 0.0 ? tp[static_cast<std::size_t>(c)] / denom_r : 0.0;
    total += prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  return total / static_cast<double>(num_classes);
}

std::string train_report_json(const TrainReport& report, int json_indent) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["variant"] = model_variant_name(report.variant);
  j["epochs_run"] = report.epochs_run;
  j["best_epoch"] = report.best_epoch;
  j["test_micro_f1"] = report.test_micro_f1;
  j["test_macro_f1"] = report.test_macro_f1;
  j["history"] = nlohmann::json::array();
  for (const EpochStats& e : report.history)
    j["history"].push_back({{"epoch", e.epoch},
                            {"train_loss", e.train_loss},
                            {"val_micro_f1", e.val_micro_f1},
                            {"val_macro_f1", e.val_macro_f1}});
  nlohmann::json alpha = nlohmann::json::array();
  for (idx_t i = 0; i < report.alpha.n_rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (idx_t k = 0; k < report.alpha.n_cols; ++k) row.push_back(report.alpha.at(i, k));
    alpha.push_back(row);
  }
  j["alpha"] = alpha;
  j["beta"] = report.beta;
  j["gamma"] = report.gamma;
  // Report-time importance normalization |beta_i| / sum_j |beta_j|.
  double denom = 0.0;
  for (double b : report.beta) denom += std::abs(b);
  nlohmann::json pct = nlohmann::json::array();
  for (double b : report.beta) pct.push_back(denom > 0.0 ? std::abs(b) / denom : 0.0);
  j["beta_importance"] = pct;
  return j.dump(json_indent);
}

TrainReport train(const DatasetBundle& dataset, const ModelConfig& config,
                  const SubgraphOptions& subgraph_options, const TrainHyper& hyper) {
  config.validate();
  if (dataset.masks.train.empty() || dataset.masks.val.empty() || dataset.masks.test.empty())
    throw ArgumentError("train: all of train/val/test masks must be non-empty");

  std::vector<MetaPathSubgraph> subgraphs;
  subgraphs.reserve(config.metapaths.size());
  for (const MetaPath& path : config.metapaths)
    subgraphs.push_back(build_subgraph(dataset.graph, path, subgraph_options));

  const DenseMatrix& x = dataset.graph.features;
  const std::vector<int>& labels = dataset.graph.labels;

  std::mt19937_64 rng(hyper.seed);
  ModelParams params = init_params(config, x.n_cols, dataset.graph.num_classes, rng);
  AdamState state = AdamState::zeros_like(params);

  TrainReport report;
  report.seed = hyper.seed;
  report.variant = config.variant;
  ModelParams best_params = params;
  double best_val = -1.0;
  std::int64_t wait = 0;

  for (std::int64_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    ForwardTrace trace = forward(subgraphs, x, params, config, /*train_mode=*/true, &rng);
    const double loss = cross_entropy_loss(trace.logits, labels, dataset.masks.train);
    const Gradients grads = backward(trace, labels, dataset.masks.train, params, config);
    adam_step(params, grads, state, hyper.adam, config.variant);

    const ForwardTrace eval_trace =
        forward(subgraphs, x, params, config, /*train_mode=*/false, nullptr,
                /*keep_caches=*/false);
    const std::vector<int> preds = argmax_rows(eval_trace.logits);
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss;
    stats.val_micro_f1 = micro_f1(preds, labels, dataset.masks.val);
    stats.val_macro_f1 = macro_f1(preds, labels, dataset.masks.val, dataset.graph.num_classes);
    report.history.push_back(stats);
    report.epochs_run = epoch + 1;

    if (stats.val_micro_f1 > best_val) {
      best_val = stats.val_micro_f1;
      best_params = params;
      report.best_epoch = epoch;
      wait = 0;
    } else if (hyper.patience >= 0 && ++wait >= hyper.patience) {
      break;
    }
  }

  const ForwardTrace test_trace =
      forward(subgraphs, x, best_params, config, /*train_mode=*/false, nullptr,
              /*keep_caches=*/false);
  const std::vector<int> preds = argmax_rows(test_trace.logits);
  report.test_micro_f1 = micro_f1(preds, labels, dataset.masks.test);
  report.test_macro_f1 = macro_f1(preds, labels, dataset.masks.test, dataset.graph.num_classes);
  report.alpha = best_params.alpha;
  report.beta = best_params.beta;
  report.gamma = best_params.gamma;
  report.best_params = std::move(best_params);
  return report;
}

}  // namespace h2sgnn
