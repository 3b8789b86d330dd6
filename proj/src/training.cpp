#include "ssam/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "ssam/errors.hpp"
#include "ssam/rng.hpp"

namespace ssam {

void AdamHyper::validate() const {
  if (!(alpha > 0.0)) throw UsageError("adam alpha must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw UsageError("adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw UsageError("adam epsilon must be positive");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw UsageError("batch_size must be at least 1");
  if (epochs < 1) throw UsageError("epochs must be at least 1");
  hyper.validate();
}

namespace {

/// Accumulates one sample's contribution into grads. upstream is
/// dLoss/dPrediction for this sample.
void backward_sample(const ModelParams& params, const ForwardCache& cache, double upstream,
                     Gradients& grads) {
  const ModelConfig& cfg = params.config;
  const std::size_t time_steps = cfg.time_step;
  const std::size_t hidden = cfg.hidden_units;
  const std::size_t input_dim = cfg.input_dim;
  const std::size_t flat_size = cache.flat.cols();

  // Dense head: prediction = flat . w + b.
  for (std::size_t f = 0; f < flat_size; ++f) {
    grads.dense.w(f, 0) += upstream * cache.flat(0, f);
  }
  grads.dense.b(0, 0) += upstream;

  Matrix d_seq(time_steps, flat_size / time_steps);
  for (std::size_t idx = 0; idx < flat_size; ++idx) {
    d_seq.data()[idx] = upstream * params.dense.w(idx, 0);
  }

  Matrix d_hidden;
  if (cfg.use_attention) {
    const AttentionCache& at = cache.attention;
    const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(cfg.attention_dim));

    Matrix d_context =
        hadamard(d_seq, activation_derivative(cfg.post_attention_activation, at.context));

    Matrix d_weights = matmul(d_context, transpose(at.v));
    Matrix d_v = matmul(transpose(at.weights), d_context);

    // Softmax backward, row by row: dS = P * (dP - sum(dP * P)).
    Matrix d_scores(time_steps, time_steps);
    for (std::size_t r = 0; r < time_steps; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < time_steps; ++c) {
        dot += d_weights(r, c) * at.weights(r, c);
      }
      for (std::size_t c = 0; c < time_steps; ++c) {
        d_scores(r, c) = at.weights(r, c) * (d_weights(r, c) - dot);
      }
    }

    Matrix d_q = scaled(matmul(d_scores, at.k), inv_sqrt_dk);
    Matrix d_k = scaled(matmul(transpose(d_scores), at.q), inv_sqrt_dk);

    Matrix h_t = transpose(at.h_in);
    accumulate(grads.attention.w_q, matmul(h_t, d_q));
    accumulate(grads.attention.w_k, matmul(h_t, d_k));
    accumulate(grads.attention.w_v, matmul(h_t, d_v));
    accumulate(grads.attention.b_q, column_sums(d_q));
    accumulate(grads.attention.b_k, column_sums(d_k));
    accumulate(grads.attention.b_v, column_sums(d_v));

    d_hidden = matmul(d_q, transpose(params.attention.w_q));
    accumulate(d_hidden, matmul(d_k, transpose(params.attention.w_k)));
    accumulate(d_hidden, matmul(d_v, transpose(params.attention.w_v)));
  } else {
    d_hidden = std::move(d_seq);
  }

  // Backpropagation through time over the LSTM steps.
  std::vector<double> dh_next(hidden, 0.0);
  std::vector<double> dc_next(hidden, 0.0);
  std::vector<double> dz_f(hidden), dz_i(hidden), dz_g(hidden), dz_o(hidden), dc(hidden);

  for (std::size_t t = time_steps; t-- > 0;) {
    const LstmStepCache& st = cache.lstm.steps[t];
    const LstmStepCache* prev = t > 0 ? &cache.lstm.steps[t - 1] : nullptr;

    for (std::size_t u = 0; u < hidden; ++u) {
      const double dh = d_hidden(t, u) + dh_next[u];
      const double f = st.f(0, u);
      const double i = st.i(0, u);
      const double g = st.g(0, u);
      const double o = st.o(0, u);
      const double tc = st.tanh_c(0, u);
      const double c_prev = prev ? prev->c(0, u) : 0.0;

      dz_o[u] = dh * tc * o * (1.0 - o);
      const double dcu = dh * o * (1.0 - tc * tc) + dc_next[u];
      dz_f[u] = dcu * c_prev * f * (1.0 - f);
      dz_i[u] = dcu * g * i * (1.0 - i);
      dz_g[u] = dcu * i * (1.0 - g * g);
      dc[u] = dcu;
    }

    const auto add_gate_grads = [&](const std::vector<double>& dz, Matrix& gw, Matrix& gu,
                                    Matrix& gb) {
      for (std::size_t d = 0; d < input_dim; ++d) {
        const double x_d = cache.lstm.input(t, d);
        for (std::size_t u = 0; u < hidden; ++u) {
          gw(d, u) += x_d * dz[u];
        }
      }
      if (prev) {
        for (std::size_t k = 0; k < hidden; ++k) {
          const double h_k = prev->h(0, k);
          for (std::size_t u = 0; u < hidden; ++u) {
            gu(k, u) += h_k * dz[u];
          }
        }
      }
      for (std::size_t u = 0; u < hidden; ++u) {
        gb(0, u) += dz[u];
      }
    };
    add_gate_grads(dz_f, grads.lstm.w_f, grads.lstm.u_f, grads.lstm.b_f);
    add_gate_grads(dz_i, grads.lstm.w_i, grads.lstm.u_i, grads.lstm.b_i);
    add_gate_grads(dz_g, grads.lstm.w_g, grads.lstm.u_g, grads.lstm.b_g);
    add_gate_grads(dz_o, grads.lstm.w_o, grads.lstm.u_o, grads.lstm.b_o);

    // dh_prev = sum over gates of dz . U^T; dc_prev = dc * f.
    for (std::size_t k = 0; k < hidden; ++k) {
      double acc = 0.0;
      for (std::size_t u = 0; u < hidden; ++u) {
        acc += dz_f[u] * params.lstm.u_f(k, u) + dz_i[u] * params.lstm.u_i(k, u) +
               dz_g[u] * params.lstm.u_g(k, u) + dz_o[u] * params.lstm.u_o(k, u);
      }
      dh_next[k] = acc;
    }
    for (std::size_t u = 0; u < hidden; ++u) {
      dc_next[u] = dc[u] * st.f(0, u);
    }
  }
}

double batch_loss(const ModelParams& params, std::span<const std::vector<double>> windows,
                  std::span<const double> targets) {
  double sq_sum = 0.0;
  for (std::size_t s = 0; s < windows.size(); ++s) {
    const double pred = model_forward(params, window_matrix(windows[s], params.config.input_dim));
    const double diff = pred - targets[s];
    sq_sum += diff * diff;
  }
  return sq_sum / static_cast<double>(windows.size());
}

}  // namespace

std::vector<TensorRef> Gradients::tensors() {
  return detail::collect_tensor_refs(lstm, attention, dense);
}

std::vector<ConstTensorRef> Gradients::tensors() const {
  return detail::collect_tensor_refs(lstm, attention, dense);
}

Gradients Gradients::zeros(const ModelConfig& config) {
  config.validate();
  Gradients g;
  const std::size_t in = config.input_dim;
  const std::size_t hidden = config.hidden_units;
  g.lstm.w_f = Matrix(in, hidden);
  g.lstm.w_i = Matrix(in, hidden);
  g.lstm.w_g = Matrix(in, hidden);
  g.lstm.w_o = Matrix(in, hidden);
  g.lstm.u_f = Matrix(hidden, hidden);
  g.lstm.u_i = Matrix(hidden, hidden);
  g.lstm.u_g = Matrix(hidden, hidden);
  g.lstm.u_o = Matrix(hidden, hidden);
  g.lstm.b_f = Matrix(1, hidden);
  g.lstm.b_i = Matrix(1, hidden);
  g.lstm.b_g = Matrix(1, hidden);
  g.lstm.b_o = Matrix(1, hidden);
  if (config.use_attention) {
    const std::size_t dk = config.attention_dim;
    g.attention.w_q = Matrix(hidden, dk);
    g.attention.w_k = Matrix(hidden, dk);
    g.attention.w_v = Matrix(hidden, dk);
    g.attention.b_q = Matrix(1, dk);
    g.attention.b_k = Matrix(1, dk);
    g.attention.b_v = Matrix(1, dk);
  }
  g.dense.w = Matrix(config.flat_size(), 1);
  g.dense.b = Matrix(1, 1);
  return g;
}

AdamState AdamState::init(const ModelConfig& config) {
  return AdamState{Gradients::zeros(config), Gradients::zeros(config), 0};
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw UsageError("mse_loss: need equal nonempty prediction/target lists");
  }
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double diff = predictions[i] - targets[i];
    sq_sum += diff * diff;
  }
  return sq_sum / static_cast<double>(predictions.size());
}

std::pair<double, Gradients> backward(const ModelParams& params,
                                      std::span<const std::vector<double>> windows,
                                      std::span<const double> targets) {
  if (windows.empty() || windows.size() != targets.size()) {
    throw UsageError("backward: need equal nonempty window/target lists");
  }
  Gradients grads = Gradients::zeros(params.config);
  const double batch_n = static_cast<double>(windows.size());

  double sq_sum = 0.0;
  ForwardCache cache;
  for (std::size_t s = 0; s < windows.size(); ++s) {
    const Matrix window = window_matrix(windows[s], params.config.input_dim);
    const double pred = model_forward(params, window, &cache);
    const double diff = pred - targets[s];
    sq_sum += diff * diff;
    backward_sample(params, cache, 2.0 * diff / batch_n, grads);
  }
  return {sq_sum / batch_n, std::move(grads)};
}

double central_difference(const std::function<double(double)>& f, double x, double eps) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

Gradients finite_diff_grad(const ModelParams& params, std::span<const std::vector<double>> windows,
                           std::span<const double> targets, double eps) {
  if (windows.empty() || windows.size() != targets.size()) {
    throw UsageError("finite_diff_grad: need equal nonempty window/target lists");
  }
  ModelParams probe = params;
  Gradients grads = Gradients::zeros(params.config);

  auto probe_tensors = probe.tensors();
  auto grad_tensors = grads.tensors();
  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    Matrix& tensor = *probe_tensors[t].tensor;
    Matrix& grad = *grad_tensors[t].tensor;
    for (std::size_t idx = 0; idx < tensor.size(); ++idx) {
      const double saved = tensor.data()[idx];
      tensor.data()[idx] = saved + eps;
      const double loss_plus = batch_loss(probe, windows, targets);
      tensor.data()[idx] = saved - eps;
      const double loss_minus = batch_loss(probe, windows, targets);
      tensor.data()[idx] = saved;
      grad.data()[idx] = (loss_plus - loss_minus) / (2.0 * eps);
    }
  }
  return grads;
}

void adam_step(AdamState& state, ModelParams& params, const Gradients& grads,
               const AdamHyper& hyper) {
  hyper.validate();
  state.t += 1;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));

  auto param_tensors = params.tensors();
  auto grad_tensors = grads.tensors();
  auto m_tensors = state.m.tensors();
  auto v_tensors = state.v.tensors();
  if (param_tensors.size() != grad_tensors.size()) {
    throw ShapeError("adam_step: gradient layout does not match parameters");
  }

  for (std::size_t t = 0; t < param_tensors.size(); ++t) {
    Matrix& theta = *param_tensors[t].tensor;
    const Matrix& g = *grad_tensors[t].tensor;
    Matrix& m = *m_tensors[t].tensor;
    Matrix& v = *v_tensors[t].tensor;
    if (!theta.same_shape(g)) {
      throw ShapeError("adam_step: tensor " + param_tensors[t].name + " is " + theta.shape_str() +
                       " but gradient is " + g.shape_str());
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = g.data()[i];
      m.data()[i] = hyper.beta1 * m.data()[i] + (1.0 - hyper.beta1) * gi;
      v.data()[i] = hyper.beta2 * v.data()[i] + (1.0 - hyper.beta2) * gi * gi;
      const double m_hat = m.data()[i] / bc1;
      const double v_hat = v.data()[i] / bc2;
      theta.data()[i] -= hyper.alpha * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
  }
}

TrainResult train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const WindowedDataset& dataset, std::ostream* progress) {
  model_config.validate();
  train_config.validate();
  if (dataset.size() == 0) {
    throw DataError("train: dataset is empty");
  }

  TrainResult result;
  result.params = init_params(model_config);
  AdamState state = AdamState::init(model_config);
  result.loss_history.reserve(train_config.epochs);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> batch_windows;
  std::vector<double> batch_targets;

  for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
    if (train_config.shuffle) {
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 gen(train_config.shuffle_seed + epoch);
      rng::shuffle(order, gen);
    }

    double epoch_sq_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += train_config.batch_size) {
      const std::size_t end = std::min(begin + train_config.batch_size, order.size());
      batch_windows.clear();
      batch_targets.clear();
      for (std::size_t idx = begin; idx < end; ++idx) {
        batch_windows.push_back(dataset.inputs[order[idx]]);
        batch_targets.push_back(dataset.targets[order[idx]]);
      }

      auto [loss, grads] = backward(result.params, batch_windows, batch_targets);
      if (!std::isfinite(loss)) {
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch + 1));
      }
      epoch_sq_sum += loss * static_cast<double>(end - begin);
      adam_step(state, result.params, grads, train_config.hyper);
    }

    const double epoch_loss = epoch_sq_sum / static_cast<double>(order.size());
    result.loss_history.push_back(epoch_loss);
    if (progress) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      (*progress) << "epoch " << (epoch + 1) << "/" << train_config.epochs << " loss "
                  << epoch_loss << " elapsed " << elapsed << "s\n";
    }
  }
  return result;
}

}  // namespace ssam
