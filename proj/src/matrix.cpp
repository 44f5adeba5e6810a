#include "relayabc/matrix.hpp"

#include <stdexcept>
#include <string>

#include "relayabc/errors.hpp"
#include "relayabc/kernels.hpp"

namespace relayabc {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::splice(std::size_t top, std::size_t bottom, std::size_t left, std::size_t right) const {
  if (top > bottom || left > right || bottom >= rows_ || right >= cols_) {
    throw IndexOutOfRange("splice [" + std::to_string(top) + "," + std::to_string(bottom) + ":" +
                          std::to_string(left) + "," + std::to_string(right) + "] outside " +
                          std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  Matrix out(bottom - top + 1, right - left + 1);
  for (std::size_t r = top; r <= bottom; ++r) {
    for (std::size_t c = left; c <= right; ++c) out(r - top, c - left) = (*this)(r, c);
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix shapes do not chain");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double w = a(i, k);
      if (w != 0.0) kernels::axpy(w, b.row(k), dst);
    }
  }
  return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector shapes do not chain");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * x[k];
    out[i] = acc;
  }
  return out;
}

Matrix product(std::span<const Matrix> ms) {
  if (ms.empty()) throw std::invalid_argument("product of an empty sequence");
  Matrix acc = ms[0];
  for (std::size_t k = 1; k < ms.size(); ++k) acc = multiply(acc, ms[k]);
  return acc;
}

Matrix matrix_splice(const Matrix& m, std::size_t top, std::size_t bottom, std::size_t left, std::size_t right) {
  return m.splice(top, bottom, left, right);
}

Matrix bottom_block(const Matrix& m, std::size_t h) {
  if (h == 0 || h > m.rows() || h > m.cols()) throw IndexOutOfRange("bottom block larger than matrix");
  return m.splice(m.rows() - h, m.rows() - 1, m.cols() - h, m.cols() - 1);
}

std::optional<std::size_t> positive_column(const Matrix& m, double threshold, std::size_t tail) {
  auto column_ok = [&](std::size_t c) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!(m(r, c) > threshold)) return false;
    }
    return m.rows() > 0;
  };
  const std::size_t first_tail = m.cols() >= tail ? m.cols() - tail : 0;
  for (std::size_t c = first_tail; c < m.cols(); ++c) {
    if (column_ok(c)) return c;
  }
  for (std::size_t c = 0; c < first_tail; ++c) {
    if (column_ok(c)) return c;
  }
  return std::nullopt;
}

}  // namespace relayabc
