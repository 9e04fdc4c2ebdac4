#include "lehi/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lehi {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("DenseMatrix: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::column(std::span<const double> values) {
  return DenseMatrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double DenseMatrix::max_abs() const noexcept {
  double best = 0.0;
  for (double x : data_) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    best = std::max(best, std::fabs(x));
  }
  return best;
}

double DenseMatrix::sum() const noexcept {
  double s = 0.0;
  for (double x : data_) s += x;
  return s;
}

std::string shape_string(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_string(a) + " * " + shape_string(b));
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  DenseMatrix out(n, m);
  auto o = out.data();
  auto ad = a.data();
  auto bd = b.data();
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = o.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ad[i * k + p];
      const double* brow = bd.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: " + shape_string(a) + "^T * " + shape_string(b));
  }
  const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
  DenseMatrix out(n, m);
  auto o = out.data();
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = ad.data() + p * n;
    const double* brow = bd.data() + p * m;
    for (std::size_t i = 0; i < n; ++i) {
      const double api = arow[i];
      double* orow = o.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += api * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: " + shape_string(a) + " * " + shape_string(b) + "^T");
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  DenseMatrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto arow = a.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto brow = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      out(i, j) = s;
    }
  }
  return out;
}

namespace {

template <typename F>
DenseMatrix map(const DenseMatrix& a, F f) {
  DenseMatrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

template <typename F>
DenseMatrix zip(const DenseMatrix& a, const DenseMatrix& b, F f) {
  DenseMatrix out(a.rows(), a.cols());
  auto x = a.data();
  auto y = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = f(x[i], y[i]);
  return out;
}

}  // namespace

DenseMatrix elementwise(ElementOp op, const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("elementwise: " + shape_string(a) + " vs " + shape_string(b));
  }
  switch (op) {
    case ElementOp::add: return zip(a, b, [](double x, double y) { return x + y; });
    case ElementOp::sub: return zip(a, b, [](double x, double y) { return x - y; });
    case ElementOp::mul: return zip(a, b, [](double x, double y) { return x * y; });
    case ElementOp::div: return zip(a, b, [](double x, double y) { return x / y; });
    case ElementOp::relu_grad:
      return zip(a, b, [](double up, double pre) { return pre > 0.0 ? up : 0.0; });
    default:
      throw std::invalid_argument("elementwise: op is not binary");
  }
}

DenseMatrix elementwise(ElementOp op, const DenseMatrix& a, double scalar) {
  switch (op) {
    case ElementOp::add: return map(a, [scalar](double x) { return x + scalar; });
    case ElementOp::sub: return map(a, [scalar](double x) { return x - scalar; });
    case ElementOp::mul:
    case ElementOp::scale: return map(a, [scalar](double x) { return x * scalar; });
    case ElementOp::div: return map(a, [scalar](double x) { return x / scalar; });
    case ElementOp::square: return map(a, [](double x) { return x * x; });
    case ElementOp::sqrt: return map(a, [](double x) { return std::sqrt(x); });
    case ElementOp::relu: return map(a, [](double x) { return x > 0.0 ? x : 0.0; });
    case ElementOp::relu_grad:
      throw std::invalid_argument("elementwise: relu_grad needs a preactivation operand");
  }
  throw std::invalid_argument("elementwise: unknown op");
}

}  // namespace lehi
