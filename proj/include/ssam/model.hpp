#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ssam/matrix.hpp"

namespace ssam {

/// Architecture of the predictor: one LSTM layer emitting every hidden
/// state, scaled dot-product self-attention across those states, flatten,
/// and a linear scalar head. Setting use_attention to false drops the
/// attention stage, giving the plain LSTM comparison model.
struct ModelConfig {
  std::size_t input_dim = 1;
  std::size_t hidden_units = 50;
  std::size_t time_step = 10;
  std::size_t attention_dim = 50;
  Activation post_attention_activation = Activation::Relu;
  std::uint64_t seed = 42;
  bool use_attention = true;

  /// Length of the flattened sequence feeding the dense head.
  std::size_t flat_size() const {
    return time_step * (use_attention ? attention_dim : hidden_units);
  }

  void validate() const;
};

/// Per-gate weights of the LSTM cell: W (input projection), U (recurrent
/// projection), and bias, for the forget/input/candidate/output gates.
struct LstmParams {
  Matrix w_f, w_i, w_g, w_o;  // input_dim x hidden
  Matrix u_f, u_i, u_g, u_o;  // hidden x hidden
  Matrix b_f, b_i, b_g, b_o;  // 1 x hidden
};

/// Query/key/value projections of the attention stage.
struct AttentionParams {
  Matrix w_q, w_k, w_v;  // hidden x attention_dim
  Matrix b_q, b_k, b_v;  // 1 x attention_dim
};

struct DenseParams {
  Matrix w;  // flat_size x 1
  Matrix b;  // 1 x 1
};

struct TensorRef {
  std::string name;
  Matrix* tensor;
};

struct ConstTensorRef {
  std::string name;
  const Matrix* tensor;
};

struct ModelParams {
  ModelConfig config;
  LstmParams lstm;
  AttentionParams attention;
  DenseParams dense;

  /// All learnable tensors in a fixed order; empty tensors are skipped.
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;
};

namespace detail {
std::vector<TensorRef> collect_tensor_refs(LstmParams& lstm, AttentionParams& attention,
                                           DenseParams& dense);
std::vector<ConstTensorRef> collect_tensor_refs(const LstmParams& lstm,
                                                const AttentionParams& attention,
                                                const DenseParams& dense);
}  // namespace detail

struct ParamCounts {
  std::size_t lstm = 0;
  std::size_t attention = 0;
  std::size_t flatten = 0;
  std::size_t dense = 0;

  std::size_t total() const { return lstm + attention + flatten + dense; }
};

/// Closed-form per-layer scalar counts for a config.
ParamCounts count_params(const ModelConfig& config);

/// Glorot-uniform weights, zero biases; a pure function of config.seed.
ModelParams init_params(const ModelConfig& config);

/// Checks every tensor against the shape the config demands.
void validate_shapes(const ModelParams& params);

// Forward-pass caches, retained for backpropagation.
struct LstmStepCache {
  Matrix f, i, g, o;  // gate activations, 1 x hidden
  Matrix c, tanh_c, h;
};

struct LstmCache {
  Matrix input;  // time_step x input_dim
  std::vector<LstmStepCache> steps;
};

struct AttentionCache {
  Matrix h_in;     // LSTM output fed in, T x hidden
  Matrix q, k, v;  // T x attention_dim
  Matrix weights;  // row-stochastic scores, T x T
  Matrix context;  // weights * v, before the post-attention activation
};

struct ForwardCache {
  LstmCache lstm;
  AttentionCache attention;
  Matrix flat;  // 1 x flat_size
  double prediction = 0.0;
};

/// Runs the LSTM recurrence from zero initial state over the window rows
/// and returns every hidden state stacked (return-sequences semantics).
Matrix lstm_forward(const LstmParams& params, const Matrix& window, LstmCache* cache = nullptr);

/// softmax(Q K^T / sqrt(d_k)) V with learned projections of h_seq, then the
/// element-wise activation.
Matrix attention_forward(const AttentionParams& params, const Matrix& h_seq, Activation activation,
                         AttentionCache* cache = nullptr);

/// Full model: LSTM -> attention -> flatten -> linear head.
double model_forward(const ModelParams& params, const Matrix& window,
                     ForwardCache* cache = nullptr);

/// Reshapes a flat window vector into the time_step x input_dim matrix the
/// model consumes.
Matrix window_matrix(const std::vector<double>& window, std::size_t input_dim = 1);

}  // namespace ssam
