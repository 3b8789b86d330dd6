#include "ssam/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssam/errors.hpp"

namespace ssam {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + shape_str());
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + shape_str());
  }
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix " + shape_str() + " requires " + std::to_string(rows * cols) +
                     " values, got " + std::to_string(data_.size()));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw NumericError("matrix " + shape_str() + " constructed with non-finite entry");
    }
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> values;
  std::size_t n_rows = rows.size();
  std::size_t n_cols = n_rows > 0 ? rows.begin()->size() : 0;
  values.reserve(n_rows * n_cols);
  for (const auto& row : rows) {
    if (row.size() != n_cols) {
      throw ShapeError("from_rows: ragged row lengths");
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(n_rows, n_cols, std::move(values));
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul shape mismatch: " + a.shape_str() + " * " + b.shape_str());
  }
  const std::size_t m = a.rows(), k_dim = a.cols(), n = b.cols();
  Matrix out(m, n);
  const double* ap = a.data();
  const double* bp = b.data();
  double* op = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < k_dim; ++k) {
      const double aik = ap[i * k_dim + k];
      const double* b_row = bp + k * n;
      double* o_row = op + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        o_row[j] += aik * b_row[j];
      }
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(c, r) = m(r, c);
    }
  }
  return out;
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row_max = std::max(row_max, m(r, c));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double e = std::exp(m(r, c) - row_max);
      out(r, c) = e;
      sum += e;
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(r, c) /= sum;
    }
  }
  return out;
}

const char* to_string(Activation kind) {
  switch (kind) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Linear: return "linear";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "linear") return Activation::Linear;
  throw UsageError("unknown activation '" + std::string(name) + "'");
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Matrix apply_activation(Activation kind, const Matrix& m) {
  if (kind == Activation::Linear) return m;
  Matrix out(m.rows(), m.cols());
  const double* in = m.data();
  double* o = out.data();
  switch (kind) {
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < m.size(); ++i) o[i] = sigmoid(in[i]);
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < m.size(); ++i) o[i] = std::tanh(in[i]);
      break;
    case Activation::Relu:
      for (std::size_t i = 0; i < m.size(); ++i) o[i] = in[i] > 0.0 ? in[i] : 0.0;
      break;
    case Activation::Linear:
      break;
  }
  return out;
}

Matrix activation_derivative(Activation kind, const Matrix& pre_activation) {
  Matrix out(pre_activation.rows(), pre_activation.cols());
  const double* in = pre_activation.data();
  double* o = out.data();
  switch (kind) {
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < pre_activation.size(); ++i) {
        const double s = sigmoid(in[i]);
        o[i] = s * (1.0 - s);
      }
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < pre_activation.size(); ++i) {
        const double t = std::tanh(in[i]);
        o[i] = 1.0 - t * t;
      }
      break;
    case Activation::Relu:
      for (std::size_t i = 0; i < pre_activation.size(); ++i) o[i] = in[i] > 0.0 ? 1.0 : 0.0;
      break;
    case Activation::Linear:
      for (std::size_t i = 0; i < pre_activation.size(); ++i) o[i] = 1.0;
      break;
  }
  return out;
}

Matrix add_row_bias(const Matrix& m, const Matrix& bias) {
  if (bias.rows() != 1 || bias.cols() != m.cols()) {
    throw ShapeError("add_row_bias: bias " + bias.shape_str() + " does not fit " + m.shape_str());
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(r, c) = m(r, c) + bias(0, c);
    }
  }
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("hadamard shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.data()[i] = a.data()[i] * b.data()[i];
  }
  return out;
}

Matrix scaled(const Matrix& m, double factor) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.data()[i] = m.data()[i] * factor;
  }
  return out;
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(0, c) += m(r, c);
    }
  }
  return out;
}

void accumulate(Matrix& into, const Matrix& other) {
  if (!into.same_shape(other)) {
    throw ShapeError("accumulate shape mismatch: " + into.shape_str() + " vs " + other.shape_str());
  }
  for (std::size_t i = 0; i < into.size(); ++i) {
    into.data()[i] += other.data()[i];
  }
}

}  // namespace ssam
