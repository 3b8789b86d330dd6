#include <cmath>
#include <random>

#include "doctest.h"
#include "ssam/errors.hpp"
#include "ssam/matrix.hpp"
#include "ssam/rng.hpp"

using namespace ssam;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen, double lo = -2.0,
                     double hi = 2.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng::uniform(gen, lo, hi);
  return m;
}

}  // namespace

TEST_CASE("matrix construction validates entries") {
  CHECK_THROWS_AS(Matrix(0, 3), ShapeError);
  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::nan("")}), NumericError);
  CHECK_THROWS_AS(Matrix(1, 1, {std::numeric_limits<double>::infinity()}), NumericError);
  const Matrix ok(2, 2, {1.0, 2.0, 3.0, 4.0});
  CHECK(ok(1, 0) == 3.0);
}

TEST_CASE("matmul identity leaves the operand unchanged") {
  const Matrix identity = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  const Matrix m = Matrix::from_rows({{2.0, -1.0, 5.0}, {0.5, 3.0, 7.0}});
  const Matrix out = matmul(identity, m);
  REQUIRE(out.same_shape(m));
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(out.data()[i] == m.data()[i]);
}

TEST_CASE("matmul hand-checked product") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  const Matrix b = Matrix::from_rows({{1.0}, {1.0}});
  const Matrix out = matmul(a, b);
  REQUIRE(out.rows() == 2);
  REQUIRE(out.cols() == 1);
  CHECK(out(0, 0) == 3.0);
  CHECK(out(1, 0) == 7.0);
}

TEST_CASE("matmul rejects mismatched shapes and names both") {
  const Matrix a(2, 3);
  const Matrix b(2, 3);
  try {
    matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
  }
}

TEST_CASE("matmul is associative on random conformable triples") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(3, 4, gen);
    const Matrix b = random_matrix(4, 5, gen);
    const Matrix c = random_matrix(5, 2, gen);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
      const double denom = std::max(1e-12, std::fabs(left.data()[i]));
      CHECK(std::fabs(left.data()[i] - right.data()[i]) / denom < 1e-9);
    }
  }
}

TEST_CASE("softmax of equal entries is uniform") {
  const Matrix m(2, 4, std::vector<double>(8, 3.25));
  const Matrix out = softmax_rows(m);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == doctest::Approx(0.25));
}

TEST_CASE("softmax of a single column is all ones") {
  const Matrix m = Matrix::from_rows({{-7.0}, {3.0}, {100.0}});
  const Matrix out = softmax_rows(m);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == 1.0);
}

TEST_CASE("softmax of [0, ln 2] is [1/3, 2/3]") {
  const Matrix m = Matrix::from_rows({{0.0, std::log(2.0)}});
  const Matrix out = softmax_rows(m);
  CHECK(out(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(out(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one even with huge entries") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    // whole rows offset to +-700: a plain exp would overflow there
    Matrix m = random_matrix(3, 5, gen, -30.0, 30.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double offset = rng::uniform(gen, -700.0, 700.0);
      for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) += offset;
    }
    const Matrix out = softmax_rows(m);
    for (std::size_t r = 0; r < out.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < out.cols(); ++c) {
        CHECK(out(r, c) > 0.0);
        CHECK(out(r, c) <= 1.0);
        sum += out(r, c);
      }
      CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("activations match their definitions") {
  const Matrix m = Matrix::from_rows({{-1.0, 0.0, 2.0}});

  const Matrix relu = apply_activation(Activation::Relu, m);
  CHECK(relu(0, 0) == 0.0);
  CHECK(relu(0, 1) == 0.0);
  CHECK(relu(0, 2) == 2.0);

  const Matrix sig = apply_activation(Activation::Sigmoid, m);
  CHECK(sig(0, 1) == 0.5);
  const Matrix th = apply_activation(Activation::Tanh, m);
  CHECK(th(0, 1) == 0.0);

  const Matrix lin = apply_activation(Activation::Linear, m);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(lin.data()[i] == m.data()[i]);
}

TEST_CASE("relu is exactly x times the positivity indicator") {
  std::mt19937_64 gen(3);
  Matrix m = random_matrix(4, 4, gen, -10.0, 10.0);
  const Matrix out = apply_activation(Activation::Relu, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x = m.data()[i];
    CHECK(out.data()[i] == (x > 0.0 ? x : 0.0));
  }
}

TEST_CASE("sigmoid(x) + sigmoid(-x) == 1") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = rng::uniform(gen, -30.0, 30.0);
    const Matrix m(1, 1, {x});
    const Matrix neg(1, 1, {-x});
    const double s = apply_activation(Activation::Sigmoid, m)(0, 0);
    const double s_neg = apply_activation(Activation::Sigmoid, neg)(0, 0);
    CHECK(std::fabs(s + s_neg - 1.0) < 1e-12);
  }
}

TEST_CASE("activation names round-trip") {
  for (Activation a :
       {Activation::Sigmoid, Activation::Tanh, Activation::Relu, Activation::Linear}) {
    CHECK(activation_from_string(to_string(a)) == a);
  }
  CHECK_THROWS_AS(activation_from_string("gelu"), UsageError);
}
