#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ssam {

/// Dense row-major matrix of doubles. The workhorse value type for model
/// weights and activations; kernels never mutate their inputs.
class Matrix {
 public:
  /// Empty 0x0 sentinel (e.g. an absent tensor).
  Matrix() = default;

  /// Zero-filled rows x cols matrix; both dimensions must be positive.
  Matrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major values; rejects NaN/Inf entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// "RxC" for diagnostics.
  std::string shape_str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Standard matrix product; throws ShapeError reporting both shapes.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

/// Row-wise softmax with max subtraction, so arbitrarily large entries
/// stay finite. Every output row sums to 1.
Matrix softmax_rows(const Matrix& m);

enum class Activation { Sigmoid, Tanh, Relu, Linear };

const char* to_string(Activation kind);
Activation activation_from_string(std::string_view name);

/// Element-wise application of the activation.
Matrix apply_activation(Activation kind, const Matrix& m);

/// Element-wise derivative evaluated at the pre-activation values.
Matrix activation_derivative(Activation kind, const Matrix& pre_activation);

/// m + bias broadcast over rows; bias must be 1 x m.cols().
Matrix add_row_bias(const Matrix& m, const Matrix& bias);

/// Element-wise product; shapes must match.
Matrix hadamard(const Matrix& a, const Matrix& b);

Matrix scaled(const Matrix& m, double factor);

/// 1 x cols vector of column sums.
Matrix column_sums(const Matrix& m);

/// into += other, element-wise; shapes must match.
void accumulate(Matrix& into, const Matrix& other);

}  // namespace ssam
