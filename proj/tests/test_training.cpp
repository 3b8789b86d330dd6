#include <cmath>
#include <random>

#include "doctest.h"
#include "ssam/errors.hpp"
#include "ssam/rng.hpp"
#include "ssam/training.hpp"

using namespace ssam;

namespace {

struct TinyBatch {
  std::vector<std::vector<double>> windows;
  std::vector<double> targets;
};

// Random windows with targets drawn near the model's own predictions. A
// small loss keeps the finite-difference quantum (one ulp of the loss over
// 2 eps) well below the comparison floor; the key-projection bias has an
// exactly-zero gradient by softmax shift invariance, so its numeric probe
// is pure rounding noise scaled by that quantum.
TinyBatch random_batch(const ModelParams& params, std::size_t count, std::size_t time_step,
                       std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  TinyBatch batch;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> window(time_step);
    for (auto& v : window) v = rng::uniform(gen, 0.0, 1.0);
    const double prediction = model_forward(params, window_matrix(window));
    batch.windows.push_back(std::move(window));
    batch.targets.push_back(prediction + rng::uniform(gen, -0.1, 0.1));
  }
  return batch;
}

double max_relative_error(const Gradients& a, const Gradients& b) {
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  REQUIRE(ta.size() == tb.size());
  double worst = 0.0;
  for (std::size_t t = 0; t < ta.size(); ++t) {
    REQUIRE(ta[t].tensor->same_shape(*tb[t].tensor));
    for (std::size_t i = 0; i < ta[t].tensor->size(); ++i) {
      const double x = ta[t].tensor->data()[i];
      const double y = tb[t].tensor->data()[i];
      const double rel = std::fabs(x - y) / std::max(1e-8, std::fabs(x) + std::fabs(y));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

WindowedDataset ramp_dataset(std::size_t window_count, std::size_t time_step) {
  // linear series scaled into [0, 1]
  const std::size_t len = window_count + time_step;
  std::vector<double> series(len);
  for (std::size_t i = 0; i < len; ++i) {
    series[i] = static_cast<double>(i) / static_cast<double>(len - 1);
  }
  return make_windows(series, time_step);
}

}  // namespace

TEST_CASE("mse_loss hand-checked values") {
  CHECK(mse_loss(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}) == 0.0);
  CHECK(mse_loss(std::vector<double>{0.0}, std::vector<double>{2.0}) == 4.0);
  CHECK(mse_loss(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(mse_loss(std::vector<double>{}, std::vector<double>{}), UsageError);
  CHECK_THROWS_AS(mse_loss(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), UsageError);
}

TEST_CASE("central_difference recovers the derivative of a quadratic") {
  const double grad = central_difference([](double x) { return x * x; }, 3.0, 1e-5);
  CHECK(std::fabs(grad - 6.0) < 1e-8);
}

TEST_CASE("a zero-loss batch has an exactly zero gradient") {
  ModelConfig cfg;
  cfg.hidden_units = 4;
  cfg.attention_dim = 4;
  cfg.time_step = 3;
  ModelParams p = init_params(cfg);
  for (auto& ref : p.tensors()) {
    for (std::size_t i = 0; i < ref.tensor->size(); ++i) ref.tensor->data()[i] = 0.0;
  }
  // zero parameters predict 0 for every window, so zero targets give L = 0
  const std::vector<std::vector<double>> windows{{0.1, 0.5, 0.9}, {0.2, 0.2, 0.2}};
  const std::vector<double> targets{0.0, 0.0};

  const auto [loss, grads] = backward(p, windows, targets);
  CHECK(loss == 0.0);
  for (const auto& ref : grads.tensors()) {
    for (double v : ref.tensor->values()) CHECK(v == 0.0);
  }
  const Gradients numeric = finite_diff_grad(p, windows, targets);
  for (const auto& ref : numeric.tensors()) {
    for (double v : ref.tensor->values()) CHECK(std::fabs(v) < 1e-9);
  }
}

TEST_CASE("dense bias gradient is the mean of 2 (prediction - target)") {
  ModelConfig cfg;
  cfg.hidden_units = 5;
  cfg.attention_dim = 5;
  cfg.time_step = 4;
  cfg.seed = 3;
  const ModelParams p = init_params(cfg);
  const TinyBatch batch = random_batch(p, 3, 4, 1001);

  double expected = 0.0;
  for (std::size_t s = 0; s < batch.windows.size(); ++s) {
    const double pred = model_forward(p, window_matrix(batch.windows[s]));
    expected += 2.0 * (pred - batch.targets[s]);
  }
  expected /= static_cast<double>(batch.windows.size());

  const auto [loss, grads] = backward(p, batch.windows, batch.targets);
  CHECK(grads.dense.b(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("analytic gradients agree with central differences") {
  ModelConfig cfg;
  cfg.input_dim = 1;
  cfg.hidden_units = 5;
  cfg.attention_dim = 5;
  cfg.time_step = 4;
  cfg.seed = 12345;
  const ModelParams p = init_params(cfg);
  const TinyBatch batch = random_batch(p, 3, 4, 777);

  const auto [loss, analytic] = backward(p, batch.windows, batch.targets);
  CHECK(std::isfinite(loss));
  const Gradients numeric = finite_diff_grad(p, batch.windows, batch.targets, 1e-5);
  CHECK(max_relative_error(analytic, numeric) <= 1e-4);
}

TEST_CASE("gradients also agree on the attention-free model") {
  ModelConfig cfg;
  cfg.hidden_units = 5;
  cfg.time_step = 4;
  cfg.use_attention = false;
  cfg.seed = 99;
  const ModelParams p = init_params(cfg);
  const TinyBatch batch = random_batch(p, 3, 4, 778);

  const auto [loss, analytic] = backward(p, batch.windows, batch.targets);
  const Gradients numeric = finite_diff_grad(p, batch.windows, batch.targets, 1e-5);
  CHECK(max_relative_error(analytic, numeric) <= 1e-4);
}

TEST_CASE("a batch gradient is the mean of its per-sample gradients") {
  ModelConfig cfg;
  cfg.hidden_units = 4;
  cfg.attention_dim = 3;
  cfg.time_step = 3;
  cfg.seed = 7;
  const ModelParams p = init_params(cfg);
  const TinyBatch batch = random_batch(p, 2, 3, 2024);

  const auto [loss_both, grads_both] = backward(p, batch.windows, batch.targets);
  const auto [loss_a, grads_a] =
      backward(p, std::vector<std::vector<double>>{batch.windows[0]},
               std::vector<double>{batch.targets[0]});
  const auto [loss_b, grads_b] =
      backward(p, std::vector<std::vector<double>>{batch.windows[1]},
               std::vector<double>{batch.targets[1]});

  CHECK(loss_both == doctest::Approx((loss_a + loss_b) / 2.0).epsilon(1e-12));
  const auto tb = grads_both.tensors();
  const auto t1 = grads_a.tensors();
  const auto t2 = grads_b.tensors();
  for (std::size_t t = 0; t < tb.size(); ++t) {
    for (std::size_t i = 0; i < tb[t].tensor->size(); ++i) {
      const double mean = (t1[t].tensor->data()[i] + t2[t].tensor->data()[i]) / 2.0;
      CHECK(std::fabs(tb[t].tensor->data()[i] - mean) < 1e-12);
    }
  }
}

TEST_CASE("adam leaves parameters alone under a zero gradient") {
  ModelConfig cfg;
  cfg.hidden_units = 3;
  cfg.attention_dim = 3;
  cfg.time_step = 2;
  ModelParams p = init_params(cfg);
  const ModelParams before = p;
  AdamState state = AdamState::init(cfg);
  const Gradients zero = Gradients::zeros(cfg);
  adam_step(state, p, zero, AdamHyper{});
  CHECK(state.t == 1);
  const auto ta = p.tensors();
  const auto tb = before.tensors();
  for (std::size_t t = 0; t < ta.size(); ++t) {
    CHECK(ta[t].tensor->values() == tb[t].tensor->values());
  }
}

TEST_CASE("the first adam step moves by roughly the learning rate") {
  ModelConfig cfg;
  cfg.hidden_units = 1;
  cfg.attention_dim = 1;
  cfg.time_step = 1;
  ModelParams p = init_params(cfg);
  const double theta0 = p.dense.b(0, 0);
  AdamState state = AdamState::init(cfg);
  Gradients g = Gradients::zeros(cfg);
  g.dense.b(0, 0) = 0.1;

  const AdamHyper hyper{};
  adam_step(state, p, g, hyper);
  const double step = theta0 - p.dense.b(0, 0);
  // m_hat = g, v_hat = g^2, so the update is alpha * g / (|g| + eps)
  CHECK(step == doctest::Approx(0.001 * (0.1 / (0.1 + 1e-8))).epsilon(1e-12));
  CHECK(step > 0.000999);
  CHECK(step <= 0.001);
}

TEST_CASE("constant gradients push a parameter monotonically") {
  ModelConfig cfg;
  cfg.hidden_units = 1;
  cfg.attention_dim = 1;
  cfg.time_step = 1;
  ModelParams p = init_params(cfg);
  AdamState state = AdamState::init(cfg);
  Gradients g = Gradients::zeros(cfg);
  g.dense.b(0, 0) = -0.5;

  double prev = p.dense.b(0, 0);
  for (int i = 0; i < 5; ++i) {
    adam_step(state, p, g, AdamHyper{});
    CHECK(p.dense.b(0, 0) > prev);  // moves against the negative gradient
    prev = p.dense.b(0, 0);
  }
}

TEST_CASE("adam rejects bad hyperparameters") {
  CHECK_THROWS_AS((AdamHyper{0.0, 0.9, 0.999, 1e-8}.validate()), UsageError);
  CHECK_THROWS_AS((AdamHyper{0.001, 1.0, 0.999, 1e-8}.validate()), UsageError);
  CHECK_THROWS_AS((AdamHyper{0.001, 0.9, 0.999, 0.0}.validate()), UsageError);
}

TEST_CASE("training for one epoch with one batch equals a single adam step") {
  ModelConfig cfg;
  cfg.hidden_units = 3;
  cfg.attention_dim = 3;
  cfg.time_step = 3;
  cfg.seed = 21;
  const WindowedDataset ds = ramp_dataset(6, 3);

  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 100;  // larger than the dataset: one batch
  tc.shuffle = false;
  const TrainResult result = train(cfg, tc, ds);
  REQUIRE(result.loss_history.size() == 1);

  ModelParams manual = init_params(cfg);
  AdamState state = AdamState::init(cfg);
  const auto [loss, grads] = backward(manual, ds.inputs, ds.targets);
  adam_step(state, manual, grads, tc.hyper);
  CHECK(result.loss_history[0] == loss);

  const auto ta = result.params.tensors();
  const auto tb = manual.tensors();
  for (std::size_t t = 0; t < ta.size(); ++t) {
    CHECK(ta[t].tensor->values() == tb[t].tensor->values());
  }
}

TEST_CASE("training is bitwise deterministic given the seeds") {
  ModelConfig cfg;
  cfg.hidden_units = 4;
  cfg.attention_dim = 4;
  cfg.time_step = 4;
  cfg.seed = 5;
  const WindowedDataset ds = ramp_dataset(12, 4);
  TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 3;
  tc.shuffle_seed = 17;

  const TrainResult a = train(cfg, tc, ds);
  const TrainResult b = train(cfg, tc, ds);
  CHECK(a.loss_history == b.loss_history);
  const auto ta = a.params.tensors();
  const auto tb = b.params.tensors();
  for (std::size_t t = 0; t < ta.size(); ++t) {
    CHECK(ta[t].tensor->values() == tb[t].tensor->values());
  }
}

TEST_CASE("a tiny model overfits 20 windows of a linear series") {
  ModelConfig cfg;
  cfg.hidden_units = 8;
  cfg.attention_dim = 8;
  cfg.time_step = 5;
  cfg.seed = 42;
  const WindowedDataset ds = ramp_dataset(20, 5);

  TrainConfig tc;
  tc.epochs = 500;
  tc.batch_size = 10;
  tc.shuffle_seed = 42;
  const TrainResult result = train(cfg, tc, ds);

  CHECK(result.loss_history.back() < 1e-3);
  CHECK(result.loss_history.back() < 0.01 * result.loss_history.front());
}

TEST_CASE("train validates its configuration") {
  const WindowedDataset ds = ramp_dataset(4, 2);
  ModelConfig cfg;
  cfg.time_step = 2;
  TrainConfig tc;
  tc.epochs = 0;
  CHECK_THROWS_AS(train(cfg, tc, ds), UsageError);
  tc.epochs = 1;
  tc.batch_size = 0;
  CHECK_THROWS_AS(train(cfg, tc, ds), UsageError);
}
