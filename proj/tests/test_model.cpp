#include <cmath>
#include <random>

#include "doctest.h"
#include "ssam/errors.hpp"
#include "ssam/model.hpp"
#include "ssam/rng.hpp"

using namespace ssam;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng::uniform(gen, -1.0, 1.0);
  return m;
}

ModelParams zero_params(const ModelConfig& cfg) {
  ModelParams p = init_params(cfg);
  for (auto& ref : p.tensors()) {
    for (std::size_t i = 0; i < ref.tensor->size(); ++i) ref.tensor->data()[i] = 0.0;
  }
  return p;
}

AttentionParams random_attention(std::size_t hidden, std::size_t dk, std::mt19937_64& gen) {
  AttentionParams p;
  p.w_q = random_matrix(hidden, dk, gen);
  p.w_k = random_matrix(hidden, dk, gen);
  p.w_v = random_matrix(hidden, dk, gen);
  p.b_q = random_matrix(1, dk, gen);
  p.b_k = random_matrix(1, dk, gen);
  p.b_v = random_matrix(1, dk, gen);
  return p;
}

// Independent scalar-loop evaluation of scaled dot-product attention, kept
// deliberately naive so it cannot share a bug with the production kernel.
Matrix attention_by_hand(const AttentionParams& p, const Matrix& h, Activation act) {
  const std::size_t t_len = h.rows();
  const std::size_t hidden = h.cols();
  const std::size_t dk = p.w_q.cols();

  auto project = [&](const Matrix& w, const Matrix& b) {
    Matrix out(t_len, dk);
    for (std::size_t r = 0; r < t_len; ++r) {
      for (std::size_t c = 0; c < dk; ++c) {
        double acc = b(0, c);
        for (std::size_t m = 0; m < hidden; ++m) acc += h(r, m) * w(m, c);
        out(r, c) = acc;
      }
    }
    return out;
  };
  const Matrix q = project(p.w_q, p.b_q);
  const Matrix k = project(p.w_k, p.b_k);
  const Matrix v = project(p.w_v, p.b_v);

  Matrix out(t_len, dk);
  for (std::size_t r = 0; r < t_len; ++r) {
    std::vector<double> scores(t_len);
    double row_max = -1e300;
    for (std::size_t c = 0; c < t_len; ++c) {
      double dot = 0.0;
      for (std::size_t m = 0; m < dk; ++m) dot += q(r, m) * k(c, m);
      scores[c] = dot / std::sqrt(static_cast<double>(dk));
      row_max = std::max(row_max, scores[c]);
    }
    double denom = 0.0;
    for (std::size_t c = 0; c < t_len; ++c) denom += std::exp(scores[c] - row_max);
    for (std::size_t m = 0; m < dk; ++m) {
      double acc = 0.0;
      for (std::size_t c = 0; c < t_len; ++c) {
        acc += std::exp(scores[c] - row_max) / denom * v(c, m);
      }
      if (act == Activation::Relu) acc = acc > 0.0 ? acc : 0.0;
      out(r, m) = acc;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("count_params reproduces the reference layer sizes") {
  ModelConfig cfg;  // defaults: input 1, hidden 50, T 10, d_k 50
  const auto counts = count_params(cfg);
  CHECK(counts.lstm == 10400);
  CHECK(counts.attention == 7650);
  CHECK(counts.flatten == 0);
  CHECK(counts.dense == 501);
  CHECK(counts.total() == 18551);
}

TEST_CASE("count_params matches a direct enumeration of tensors") {
  std::mt19937_64 gen(55);
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig cfg;
    cfg.input_dim = 1 + gen() % 4;
    cfg.hidden_units = 1 + gen() % 12;
    cfg.time_step = 1 + gen() % 8;
    cfg.attention_dim = 1 + gen() % 12;
    cfg.use_attention = (gen() % 4) != 0;
    const auto counts = count_params(cfg);
    const ModelParams p = init_params(cfg);

    std::size_t lstm = 0, attn = 0, dense = 0;
    for (const auto& ref : p.tensors()) {
      if (ref.name.rfind("lstm.", 0) == 0) lstm += ref.tensor->size();
      else if (ref.name.rfind("attn.", 0) == 0) attn += ref.tensor->size();
      else dense += ref.tensor->size();
    }
    CHECK(counts.lstm == lstm);
    CHECK(counts.attention == attn);
    CHECK(counts.dense == dense);
  }
}

TEST_CASE("init_params is deterministic in the seed, with zero biases") {
  ModelConfig cfg;
  cfg.hidden_units = 6;
  cfg.attention_dim = 4;
  cfg.time_step = 5;
  cfg.seed = 777;
  const ModelParams a = init_params(cfg);
  const ModelParams b = init_params(cfg);
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].tensor->values() == tb[i].tensor->values());
  }
  for (const char* name : {"lstm.b_f", "lstm.b_i", "lstm.b_g", "lstm.b_o", "attn.b_q", "attn.b_k",
                           "attn.b_v", "dense.b"}) {
    for (const auto& ref : a.tensors()) {
      if (ref.name == name) {
        for (double v : ref.tensor->values()) CHECK(v == 0.0);
      }
    }
  }

  cfg.seed = 778;
  const ModelParams c = init_params(cfg);
  CHECK(c.lstm.w_f.values() != a.lstm.w_f.values());
}

TEST_CASE("init_params draws stay inside their Glorot bounds") {
  ModelConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_units = 9;
  cfg.attention_dim = 5;
  cfg.time_step = 4;
  const ModelParams p = init_params(cfg);

  const auto check_bound = [](const Matrix& m) {
    const double limit =
        std::sqrt(6.0 / (static_cast<double>(m.rows()) + static_cast<double>(m.cols())));
    for (double v : m.values()) {
      CHECK(std::fabs(v) <= limit);
    }
  };
  check_bound(p.lstm.w_f);
  check_bound(p.lstm.u_g);
  check_bound(p.attention.w_q);
  check_bound(p.dense.w);
}

TEST_CASE("lstm_forward with all-zero parameters emits all-zero states") {
  ModelConfig cfg;
  cfg.hidden_units = 5;
  cfg.time_step = 6;
  const ModelParams p = zero_params(cfg);
  Matrix window(6, 1);
  for (std::size_t t = 0; t < 6; ++t) window(t, 0) = 0.1 * static_cast<double>(t + 1);

  LstmCache cache;
  const Matrix h = lstm_forward(p.lstm, window, &cache);
  for (double v : h.values()) CHECK(v == 0.0);
  // gates sit at sigmoid(0) = 0.5 while the candidate stays at zero
  CHECK(cache.steps[3].f(0, 2) == 0.5);
  CHECK(cache.steps[3].g(0, 2) == 0.0);
  CHECK(cache.steps[3].c(0, 2) == 0.0);
}

TEST_CASE("a length-one sequence equals a single cell step") {
  ModelConfig cfg;
  cfg.hidden_units = 4;
  cfg.time_step = 3;
  cfg.seed = 9;
  const ModelParams p = init_params(cfg);

  Matrix window(3, 1);
  window(0, 0) = 0.7;
  window(1, 0) = -0.2;
  window(2, 0) = 0.4;
  const Matrix h_all = lstm_forward(p.lstm, window);

  Matrix first(1, 1);
  first(0, 0) = 0.7;
  const Matrix h_one = lstm_forward(p.lstm, first);
  for (std::size_t u = 0; u < 4; ++u) {
    CHECK(h_one(0, u) == h_all(0, u));
  }
}

TEST_CASE("lstm_forward output shape follows the config") {
  ModelConfig cfg;  // hidden 50, T 10
  const ModelParams p = init_params(cfg);
  Matrix window(10, 1);
  for (std::size_t t = 0; t < 10; ++t) window(t, 0) = 0.05 * static_cast<double>(t);
  const Matrix h = lstm_forward(p.lstm, window);
  CHECK(h.rows() == 10);
  CHECK(h.cols() == 50);
}

TEST_CASE("hidden states stay inside the unit box") {
  std::mt19937_64 gen(23);
  ModelConfig cfg;
  cfg.hidden_units = 8;
  cfg.time_step = 12;
  for (int trial = 0; trial < 10; ++trial) {
    cfg.seed = gen();
    const ModelParams p = init_params(cfg);
    Matrix window(12, 1);
    for (std::size_t t = 0; t < 12; ++t) window(t, 0) = rng::uniform(gen, -3.0, 3.0);
    const Matrix h = lstm_forward(p.lstm, window);
    for (double v : h.values()) CHECK(std::fabs(v) < 1.0);
  }
}

TEST_CASE("attention over a single step returns the activated value row") {
  std::mt19937_64 gen(41);
  const AttentionParams p = random_attention(3, 4, gen);
  const Matrix h = random_matrix(1, 3, gen);

  AttentionCache cache;
  const Matrix out = attention_forward(p, h, Activation::Relu, &cache);
  CHECK(cache.weights(0, 0) == 1.0);
  const Matrix v_activated = apply_activation(Activation::Relu, cache.v);
  for (std::size_t c = 0; c < out.cols(); ++c) {
    CHECK(out(0, c) == v_activated(0, c));
  }
}

TEST_CASE("zero value projection blanks the attention output") {
  std::mt19937_64 gen(43);
  AttentionParams p = random_attention(3, 4, gen);
  p.w_v = Matrix(3, 4);
  p.b_v = Matrix(1, 4);
  const Matrix h = random_matrix(5, 3, gen);
  const Matrix out = attention_forward(p, h, Activation::Relu);
  for (double v : out.values()) CHECK(v == 0.0);
}

TEST_CASE("attention matches the hand-rolled oracle") {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 20; ++trial) {
    const AttentionParams p = random_attention(4, 4, gen);
    const Matrix h = random_matrix(3, 4, gen);
    for (Activation act : {Activation::Relu, Activation::Linear}) {
      const Matrix fast = attention_forward(p, h, act);
      const Matrix slow = attention_by_hand(p, h, act);
      REQUIRE(fast.same_shape(slow));
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(std::fabs(fast.data()[i] - slow.data()[i]) < 1e-12);
      }
    }
  }
}

TEST_CASE("attention scores are row-stochastic") {
  std::mt19937_64 gen(53);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t_len = 1 + gen() % 6;
    const AttentionParams p = random_attention(5, 3, gen);
    const Matrix h = random_matrix(t_len, 5, gen);
    AttentionCache cache;
    attention_forward(p, h, Activation::Relu, &cache);
    for (std::size_t r = 0; r < t_len; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < t_len; ++c) sum += cache.weights(r, c);
      CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("permuting the input rows permutes the attention rows") {
  std::mt19937_64 gen(59);
  const AttentionParams p = random_attention(4, 4, gen);
  const Matrix h = random_matrix(5, 4, gen);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};

  Matrix h_perm(5, 4);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 4; ++c) h_perm(r, c) = h(perm[r], c);
  }
  const Matrix base = attention_forward(p, h, Activation::Relu);
  const Matrix permuted = attention_forward(p, h_perm, Activation::Relu);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(permuted(r, c) == doctest::Approx(base(perm[r], c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("model_forward with zero parameters returns the dense bias") {
  ModelConfig cfg;
  cfg.hidden_units = 5;
  cfg.attention_dim = 5;
  cfg.time_step = 4;
  ModelParams p = zero_params(cfg);
  Matrix window(4, 1);
  for (std::size_t t = 0; t < 4; ++t) window(t, 0) = 0.3;
  CHECK(model_forward(p, window) == 0.0);

  p.dense.b(0, 0) = 1.75;
  CHECK(model_forward(p, window) == 1.75);
}

TEST_CASE("intermediate shapes match the reference layer table") {
  ModelConfig cfg;  // defaults
  const ModelParams p = init_params(cfg);
  Matrix window(10, 1);
  for (std::size_t t = 0; t < 10; ++t) window(t, 0) = 0.1 * static_cast<double>(t);

  ForwardCache cache;
  const double pred = model_forward(p, window, &cache);
  CHECK(std::isfinite(pred));
  CHECK(cache.lstm.steps.size() == 10);
  CHECK(cache.lstm.steps[0].h.cols() == 50);
  CHECK(cache.attention.weights.rows() == 10);
  CHECK(cache.attention.weights.cols() == 10);
  CHECK(cache.attention.context.rows() == 10);
  CHECK(cache.attention.context.cols() == 50);
  CHECK(cache.flat.cols() == 500);
  CHECK(cache.prediction == pred);
}

TEST_CASE("the dense head is exactly linear in its weights") {
  ModelConfig cfg;
  cfg.hidden_units = 4;
  cfg.attention_dim = 3;
  cfg.time_step = 3;
  cfg.seed = 15;
  ModelParams p = init_params(cfg);
  Matrix window(3, 1);
  window(0, 0) = 0.2;
  window(1, 0) = 0.5;
  window(2, 0) = -0.1;

  ForwardCache cache;
  const double base = model_forward(p, window, &cache);
  const double delta = 0.37;
  const std::size_t idx = 4;
  p.dense.w(idx, 0) += delta;
  const double bumped = model_forward(p, window);
  CHECK(bumped - base == doctest::Approx(delta * cache.flat(0, idx)).epsilon(1e-12));
}

TEST_CASE("model_forward without attention flattens the hidden states") {
  ModelConfig cfg;
  cfg.hidden_units = 6;
  cfg.time_step = 4;
  cfg.use_attention = false;
  const ModelParams p = init_params(cfg);
  CHECK(p.attention.w_q.empty());
  CHECK(p.dense.w.rows() == 24);

  Matrix window(4, 1);
  for (std::size_t t = 0; t < 4; ++t) window(t, 0) = 0.2 * static_cast<double>(t + 1);
  ForwardCache cache;
  const double pred = model_forward(p, window, &cache);
  CHECK(std::isfinite(pred));
  CHECK(cache.flat.cols() == 24);

  const auto counts = count_params(cfg);
  CHECK(counts.attention == 0);
  CHECK(counts.dense == 25);
}

TEST_CASE("model_forward rejects windows of the wrong shape") {
  ModelConfig cfg;
  cfg.time_step = 4;
  const ModelParams p = init_params(cfg);
  Matrix window(3, 1);
  CHECK_THROWS_AS(model_forward(p, window), ShapeError);
}

TEST_CASE("validate_shapes catches missing and misshapen tensors") {
  ModelConfig cfg;
  cfg.hidden_units = 4;
  cfg.attention_dim = 4;
  cfg.time_step = 3;
  ModelParams p = init_params(cfg);
  CHECK_NOTHROW(validate_shapes(p));

  ModelParams missing = p;
  missing.dense.b = Matrix();
  CHECK_THROWS_AS(validate_shapes(missing), ShapeError);

  ModelParams wrong = p;
  wrong.lstm.u_f = Matrix(3, 4);
  CHECK_THROWS_WITH_AS(validate_shapes(wrong), doctest::Contains("lstm.u_f"), ShapeError);
}
