#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ssam/model.hpp"
#include "ssam/preprocess.hpp"

namespace ssam {

struct AdamHyper {
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Partial derivatives of the batch loss, one tensor per parameter tensor.
struct Gradients {
  LstmParams lstm;
  AttentionParams attention;
  DenseParams dense;

  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;

  static Gradients zeros(const ModelConfig& config);
};

struct AdamState {
  Gradients m;
  Gradients v;
  long long t = 0;

  static AdamState init(const ModelConfig& config);
};

struct TrainConfig {
  std::size_t batch_size = 10;
  std::size_t epochs = 50;
  std::uint64_t shuffle_seed = 42;
  bool shuffle = true;
  AdamHyper hyper;

  void validate() const;
};

/// Mean of squared differences.
double mse_loss(std::span<const double> predictions, std::span<const double> targets);

/// Exact reverse-mode gradients of the batch MSE with respect to every
/// parameter (mean of per-sample gradients). Windows are flat vectors of
/// time_step * input_dim values. Returns (loss, gradients).
std::pair<double, Gradients> backward(const ModelParams& params,
                                      std::span<const std::vector<double>> windows,
                                      std::span<const double> targets);

/// Central-difference quotient (f(x+eps) - f(x-eps)) / (2 eps).
double central_difference(const std::function<double(double)>& f, double x, double eps);

/// Numerical gradient of the same batch loss, one central difference per
/// scalar parameter. Costs 2 * param_count forward passes; meant for small
/// configs as an independent check on backward().
Gradients finite_diff_grad(const ModelParams& params, std::span<const std::vector<double>> windows,
                           std::span<const double> targets, double eps = 1e-5);

/// One Adam update with bias correction; advances state.t.
void adam_step(AdamState& state, ModelParams& params, const Gradients& grads,
               const AdamHyper& hyper);

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_history;  // mean per-sample loss per epoch
};

/// Full training loop: init, per-epoch shuffle (seeded with shuffle_seed +
/// epoch), fixed-order batches with the short final batch kept, one Adam
/// step per batch. Deterministic given the seeds. Progress lines go to
/// *progress when provided.
TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const WindowedDataset& dataset, std::ostream* progress = nullptr);

}  // namespace ssam
