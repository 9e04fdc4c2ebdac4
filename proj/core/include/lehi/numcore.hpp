#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lehi {

/// Thrown when operand shapes do not conform.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major dense matrix of doubles. Column vectors are n x 1.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Nested-list construction, one inner list per row.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix column(std::span<const double> values);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const DenseMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  DenseMatrix transposed() const;

  /// True when every element is finite.
  bool all_finite() const noexcept;
  /// Largest absolute element; NaN if any element is NaN, 0 for empty matrices.
  double max_abs() const noexcept;
  double sum() const noexcept;

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Standard product a * b. Throws ShapeError if a.cols() != b.rows().
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a^T * b without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a * b^T without materializing the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

enum class ElementOp { add, sub, mul, div, square, sqrt, scale, relu, relu_grad };

/// Binary elementwise op on equal shapes.
/// relu_grad(upstream, preactivation) passes upstream where preactivation > 0.
DenseMatrix elementwise(ElementOp op, const DenseMatrix& a, const DenseMatrix& b);

/// Unary op, or a binary op against a broadcast scalar (add/sub/mul/div/scale).
/// square, sqrt and relu ignore the scalar.
DenseMatrix elementwise(ElementOp op, const DenseMatrix& a, double scalar = 0.0);

std::string shape_string(const DenseMatrix& m);

}  // namespace lehi
