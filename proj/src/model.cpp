#include "ssam/model.hpp"

#include <cmath>
#include <random>

#include "ssam/errors.hpp"
#include "ssam/rng.hpp"

namespace ssam {

void ModelConfig::validate() const {
  if (input_dim < 1 || hidden_units < 1 || time_step < 1) {
    throw UsageError("model dimensions must be at least 1");
  }
  if (use_attention && attention_dim < 1) {
    throw UsageError("attention_dim must be at least 1");
  }
}

namespace detail {

namespace {

template <typename Ref, typename L, typename A, typename D>
std::vector<Ref> collect_impl(L& lstm, A& attention, D& dense) {
  std::vector<Ref> refs = {
      {"lstm.w_f", &lstm.w_f}, {"lstm.w_i", &lstm.w_i}, {"lstm.w_g", &lstm.w_g},
      {"lstm.w_o", &lstm.w_o}, {"lstm.u_f", &lstm.u_f}, {"lstm.u_i", &lstm.u_i},
      {"lstm.u_g", &lstm.u_g}, {"lstm.u_o", &lstm.u_o}, {"lstm.b_f", &lstm.b_f},
      {"lstm.b_i", &lstm.b_i}, {"lstm.b_g", &lstm.b_g}, {"lstm.b_o", &lstm.b_o},
      {"attn.w_q", &attention.w_q}, {"attn.w_k", &attention.w_k}, {"attn.w_v", &attention.w_v},
      {"attn.b_q", &attention.b_q}, {"attn.b_k", &attention.b_k}, {"attn.b_v", &attention.b_v},
      {"dense.w", &dense.w}, {"dense.b", &dense.b}};
  std::erase_if(refs, [](const Ref& r) { return r.tensor->empty(); });
  return refs;
}

}  // namespace

std::vector<TensorRef> collect_tensor_refs(LstmParams& lstm, AttentionParams& attention,
                                           DenseParams& dense) {
  return collect_impl<TensorRef>(lstm, attention, dense);
}

std::vector<ConstTensorRef> collect_tensor_refs(const LstmParams& lstm,
                                                const AttentionParams& attention,
                                                const DenseParams& dense) {
  return collect_impl<ConstTensorRef>(lstm, attention, dense);
}

}  // namespace detail

namespace {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  const double limit =
      std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = rng::uniform(gen, -limit, limit);
  }
  return m;
}

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError("tensor " + name + " has shape " + m.shape_str() + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

std::vector<TensorRef> ModelParams::tensors() {
  return detail::collect_tensor_refs(lstm, attention, dense);
}

std::vector<ConstTensorRef> ModelParams::tensors() const {
  return detail::collect_tensor_refs(lstm, attention, dense);
}

ParamCounts count_params(const ModelConfig& config) {
  config.validate();
  ParamCounts counts;
  counts.lstm = 4 * (config.input_dim + config.hidden_units + 1) * config.hidden_units;
  counts.attention = config.use_attention
                         ? 3 * (config.hidden_units * config.attention_dim + config.attention_dim)
                         : 0;
  counts.flatten = 0;
  counts.dense = config.flat_size() + 1;
  return counts;
}

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  std::mt19937_64 gen(config.seed);

  ModelParams p;
  p.config = config;
  const std::size_t in = config.input_dim;
  const std::size_t hidden = config.hidden_units;

  p.lstm.w_f = glorot_uniform(in, hidden, gen);
  p.lstm.w_i = glorot_uniform(in, hidden, gen);
  p.lstm.w_g = glorot_uniform(in, hidden, gen);
  p.lstm.w_o = glorot_uniform(in, hidden, gen);
  p.lstm.u_f = glorot_uniform(hidden, hidden, gen);
  p.lstm.u_i = glorot_uniform(hidden, hidden, gen);
  p.lstm.u_g = glorot_uniform(hidden, hidden, gen);
  p.lstm.u_o = glorot_uniform(hidden, hidden, gen);
  p.lstm.b_f = Matrix(1, hidden);
  p.lstm.b_i = Matrix(1, hidden);
  p.lstm.b_g = Matrix(1, hidden);
  p.lstm.b_o = Matrix(1, hidden);

  if (config.use_attention) {
    const std::size_t dk = config.attention_dim;
    p.attention.w_q = glorot_uniform(hidden, dk, gen);
    p.attention.w_k = glorot_uniform(hidden, dk, gen);
    p.attention.w_v = glorot_uniform(hidden, dk, gen);
    p.attention.b_q = Matrix(1, dk);
    p.attention.b_k = Matrix(1, dk);
    p.attention.b_v = Matrix(1, dk);
  }

  p.dense.w = glorot_uniform(config.flat_size(), 1, gen);
  p.dense.b = Matrix(1, 1);
  return p;
}

void validate_shapes(const ModelParams& params) {
  const ModelConfig& cfg = params.config;
  cfg.validate();
  const std::size_t in = cfg.input_dim;
  const std::size_t hidden = cfg.hidden_units;

  expect_shape(params.lstm.w_f, in, hidden, "lstm.w_f");
  expect_shape(params.lstm.w_i, in, hidden, "lstm.w_i");
  expect_shape(params.lstm.w_g, in, hidden, "lstm.w_g");
  expect_shape(params.lstm.w_o, in, hidden, "lstm.w_o");
  expect_shape(params.lstm.u_f, hidden, hidden, "lstm.u_f");
  expect_shape(params.lstm.u_i, hidden, hidden, "lstm.u_i");
  expect_shape(params.lstm.u_g, hidden, hidden, "lstm.u_g");
  expect_shape(params.lstm.u_o, hidden, hidden, "lstm.u_o");
  expect_shape(params.lstm.b_f, 1, hidden, "lstm.b_f");
  expect_shape(params.lstm.b_i, 1, hidden, "lstm.b_i");
  expect_shape(params.lstm.b_g, 1, hidden, "lstm.b_g");
  expect_shape(params.lstm.b_o, 1, hidden, "lstm.b_o");

  if (cfg.use_attention) {
    const std::size_t dk = cfg.attention_dim;
    expect_shape(params.attention.w_q, hidden, dk, "attn.w_q");
    expect_shape(params.attention.w_k, hidden, dk, "attn.w_k");
    expect_shape(params.attention.w_v, hidden, dk, "attn.w_v");
    expect_shape(params.attention.b_q, 1, dk, "attn.b_q");
    expect_shape(params.attention.b_k, 1, dk, "attn.b_k");
    expect_shape(params.attention.b_v, 1, dk, "attn.b_v");
  } else {
    if (!params.attention.w_q.empty() || !params.attention.w_k.empty() ||
        !params.attention.w_v.empty()) {
      throw ShapeError("attention tensors present on a model configured without attention");
    }
  }

  expect_shape(params.dense.w, cfg.flat_size(), 1, "dense.w");
  expect_shape(params.dense.b, 1, 1, "dense.b");
}

Matrix lstm_forward(const LstmParams& params, const Matrix& window, LstmCache* cache) {
  const std::size_t time_steps = window.rows();
  const std::size_t input_dim = window.cols();
  const std::size_t hidden = params.w_f.cols();
  if (params.w_f.rows() != input_dim) {
    throw ShapeError("lstm_forward: window " + window.shape_str() + " does not match w_f " +
                     params.w_f.shape_str());
  }

  if (cache) {
    cache->input = window;
    cache->steps.clear();
    cache->steps.reserve(time_steps);
  }

  Matrix h_prev(1, hidden);
  Matrix c_prev(1, hidden);
  Matrix h_seq(time_steps, hidden);

  Matrix x(1, input_dim);
  for (std::size_t t = 0; t < time_steps; ++t) {
    for (std::size_t d = 0; d < input_dim; ++d) x(0, d) = window(t, d);

    const auto gate_pre = [&](const Matrix& w, const Matrix& u, const Matrix& b) {
      Matrix pre = matmul(x, w);
      accumulate(pre, matmul(h_prev, u));
      accumulate(pre, b);
      return pre;
    };

    Matrix f = apply_activation(Activation::Sigmoid, gate_pre(params.w_f, params.u_f, params.b_f));
    Matrix i = apply_activation(Activation::Sigmoid, gate_pre(params.w_i, params.u_i, params.b_i));
    Matrix g = apply_activation(Activation::Tanh, gate_pre(params.w_g, params.u_g, params.b_g));
    Matrix o = apply_activation(Activation::Sigmoid, gate_pre(params.w_o, params.u_o, params.b_o));

    Matrix c(1, hidden);
    Matrix tanh_c(1, hidden);
    Matrix h(1, hidden);
    for (std::size_t u = 0; u < hidden; ++u) {
      c(0, u) = f(0, u) * c_prev(0, u) + i(0, u) * g(0, u);
      tanh_c(0, u) = std::tanh(c(0, u));
      h(0, u) = o(0, u) * tanh_c(0, u);
      h_seq(t, u) = h(0, u);
    }

    if (cache) {
      cache->steps.push_back(LstmStepCache{f, i, g, o, c, tanh_c, h});
    }
    h_prev = std::move(h);
    c_prev = std::move(c);
  }
  return h_seq;
}

Matrix attention_forward(const AttentionParams& params, const Matrix& h_seq, Activation activation,
                         AttentionCache* cache) {
  if (params.w_q.rows() != h_seq.cols()) {
    throw ShapeError("attention_forward: input " + h_seq.shape_str() + " does not match w_q " +
                     params.w_q.shape_str());
  }
  const std::size_t dk = params.w_q.cols();

  Matrix q = add_row_bias(matmul(h_seq, params.w_q), params.b_q);
  Matrix k = add_row_bias(matmul(h_seq, params.w_k), params.b_k);
  Matrix v = add_row_bias(matmul(h_seq, params.w_v), params.b_v);

  Matrix scores = scaled(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(dk)));
  Matrix weights = softmax_rows(scores);
  Matrix context = matmul(weights, v);
  Matrix out = apply_activation(activation, context);

  if (cache) {
    cache->h_in = h_seq;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->weights = std::move(weights);
    cache->context = std::move(context);
  }
  return out;
}

double model_forward(const ModelParams& params, const Matrix& window, ForwardCache* cache) {
  const ModelConfig& cfg = params.config;
  if (window.rows() != cfg.time_step || window.cols() != cfg.input_dim) {
    throw ShapeError("model_forward: window " + window.shape_str() + " does not match config " +
                     std::to_string(cfg.time_step) + "x" + std::to_string(cfg.input_dim));
  }

  Matrix h_seq = lstm_forward(params.lstm, window, cache ? &cache->lstm : nullptr);
  Matrix sequence_out =
      cfg.use_attention
          ? attention_forward(params.attention, h_seq, cfg.post_attention_activation,
                              cache ? &cache->attention : nullptr)
          : std::move(h_seq);

  // Row-major data is already the flatten order.
  Matrix flat(1, sequence_out.size(), sequence_out.values());
  if (flat.cols() != params.dense.w.rows()) {
    throw ShapeError("model_forward: flat size " + std::to_string(flat.cols()) +
                     " does not match dense.w " + params.dense.w.shape_str());
  }
  double prediction = params.dense.b(0, 0);
  for (std::size_t f = 0; f < flat.cols(); ++f) {
    prediction += flat(0, f) * params.dense.w(f, 0);
  }

  if (cache) {
    cache->flat = std::move(flat);
    cache->prediction = prediction;
  }
  return prediction;
}

Matrix window_matrix(const std::vector<double>& window, std::size_t input_dim) {
  if (input_dim < 1 || window.size() % input_dim != 0) {
    throw ShapeError("window of " + std::to_string(window.size()) +
                     " values does not divide into rows of " + std::to_string(input_dim));
  }
  return Matrix(window.size() / input_dim, input_dim, window);
}

}  // namespace ssam
