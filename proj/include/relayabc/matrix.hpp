#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace relayabc {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  /// Rows top..bottom and columns left..right, all inclusive. Throws
  /// IndexOutOfRange for inverted or out-of-range bounds.
  Matrix splice(std::size_t top, std::size_t bottom, std::size_t left, std::size_t right) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b. Throws std::invalid_argument on shape mismatch.
Matrix multiply(const Matrix& a, const Matrix& b);

/// a * x.
std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// Product of the sequence in the given order, ms[0] * ms[1] * ...
Matrix product(std::span<const Matrix> ms);

/// Inclusive-bounds submatrix, same as Matrix::splice.
Matrix matrix_splice(const Matrix& m, std::size_t top, std::size_t bottom, std::size_t left, std::size_t right);

/// Bottom-right h x h block of an hD x hD matrix.
Matrix bottom_block(const Matrix& m, std::size_t h);

/// Smallest column whose every entry exceeds `threshold`, searching the last
/// `tail` columns before the rest; nullopt if none.
std::optional<std::size_t> positive_column(const Matrix& m, double threshold, std::size_t tail);

}  // namespace relayabc
