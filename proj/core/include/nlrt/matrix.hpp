#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nlrt {

/// Small dense row-major matrix used for Q and covariance inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t d);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<std::vector<double>> to_rows() const;

  bool is_square() const noexcept { return rows_ == cols_; }
  bool is_symmetric(double tol = 0.0) const;
  bool is_zero() const;

  /// x' A x for square A.
  double quadratic_form(std::span<const double> x) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace nlrt
