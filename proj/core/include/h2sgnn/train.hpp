#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "h2sgnn/dataio.hpp"
#include "h2sgnn/model.hpp"

namespace h2sgnn {

// One gradient tensor per ModelParams field, shape-matched.
struct Gradients {
  DenseMatrix w;
  DenseMatrix alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<LinearLayer> mlp;
};

// Exact reverse-mode gradients of the masked mean cross-entropy through the
// whole computation graph. The beta dependence is differentiated through
// every recurrence step of the global operator; adjacencies and features
// are constants. Requires a trace produced with caching enabled.
Gradients backward(const ForwardTrace& trace, std::span<const int> labels,
                   std::span<const idx_t> mask, const ModelParams& params,
                   const ModelConfig& config);

struct AdamHyper {
  double lr = 0.01;
  double weight_decay = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Optional overrides for the coefficient tensors alpha/beta/gamma;
  // negative means "use the base value".
  double lr_coeffs = -1.0;
  double wd_coeffs = -1.0;
};

// First and second moment estimates, shape-matched to the parameters.
struct AdamState {
  ModelParams m;
  ModelParams v;
  std::int64_t step = 0;

  static AdamState zeros_like(const ModelParams& params);
};

// Decoupled-weight-decay adaptive-moment update with bias correction.
// Only the tensors trained under `variant` are touched; frozen tensors keep
// their values and moments. Throws ArgumentError on non-finite gradients.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamHyper& hyper, Variant variant);

struct TrainHyper {
  AdamHyper adam;
  std::int64_t epochs = 2000;
  std::int64_t patience = 100;  // negative disables early stopping
  std::uint64_t seed = 0;
};

struct EpochStats {
  std::int64_t epoch = 0;
  double train_loss = 0.0;
  double val_micro_f1 = 0.0;
  double val_macro_f1 = 0.0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  Variant variant = Variant::Full;
  std::int64_t epochs_run = 0;
  std::int64_t best_epoch = -1;
  std::vector<EpochStats> history;
  double test_micro_f1 = 0.0;
  double test_macro_f1 = 0.0;
  // Learned filter coefficients at the best-validation checkpoint.
  DenseMatrix alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  ModelParams best_params;
};

std::string train_report_json(const TrainReport& report, int json_indent = 2);

// Full training run: subgraph construction, epoch loop with early stopping
// on validation Micro-F1, best-checkpoint restore, test evaluation.
// Deterministic given the seed.
TrainReport train(const DatasetBundle& dataset, const ModelConfig& config,
                  const SubgraphOptions& subgraph_options, const TrainHyper& hyper);

std::vector<int> argmax_rows(const DenseMatrix& logits);
// Micro-averaged F1 == accuracy for single-label multiclass prediction.
double micro_f1(std::span<const int> preds, std::span<const int> labels,
                std::span<const idx_t> mask);
// Unweighted mean of per-class F1; classes absent from both predictions and
// labels contribute zero.
double macro_f1(std::span<const int> preds, std::span<const int> labels,
                std::span<const idx_t> mask, int num_classes);

}  // namespace h2sgnn
