#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ifsm {

/// Dense real vector.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double value = 0.0) : data_(dim, value) {}
  Vector(std::initializer_list<double> values);
  /// Throws NonFinite if any entry is NaN or Inf.
  explicit Vector(std::vector<double> values);

  std::size_t dim() const noexcept { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> entries() noexcept { return data_; }
  std::span<const double> entries() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double norm() const;
  double dot(const Vector& other) const;
  bool all_finite() const;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

/// Diagonal matrix stored as its diagonal; off-diagonal entries are zero.
class DiagonalMatrix {
 public:
  DiagonalMatrix() = default;
  explicit DiagonalMatrix(std::size_t dim, double value = 0.0) : diag_(dim, value) {}
  DiagonalMatrix(std::initializer_list<double> values) : diag_(values) {}
  explicit DiagonalMatrix(std::vector<double> values);

  static DiagonalMatrix identity(std::size_t dim) { return DiagonalMatrix(dim, 1.0); }

  std::size_t dim() const noexcept { return diag_.size(); }
  double& operator[](std::size_t i) { return diag_[i]; }
  double operator[](std::size_t i) const { return diag_[i]; }
  const std::vector<double>& diagonal() const noexcept { return diag_; }

  DiagonalMatrix inverse() const;
  DiagonalMatrix squared() const;
  double norm() const;

  bool operator==(const DiagonalMatrix&) const = default;

 private:
  std::vector<double> diag_;
};

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  /// Row-major entries; throws ShapeMismatch on a size mismatch and
  /// NonFinite on NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Nested row lists, e.g. {{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_diagonal(const DiagonalMatrix& d);
  static Matrix from_columns(std::span<const Vector> columns);
  static Matrix from_rows(std::span<const Vector> rows);
  static Matrix outer(const Vector& a, const Vector& b);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector row_vector(std::size_t i) const;
  Vector column(std::size_t j) const;
  void set_column(std::size_t j, const Vector& v);

  std::span<const double> entries() const noexcept { return data_; }

  Matrix transpose() const;
  DiagonalMatrix diagonal() const;
  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;
  /// ‖A − Aᵀ‖ (Frobenius); zero for non-square input is not meaningful.
  double asymmetry() const;
  /// Replaces A with (A + Aᵀ)/2.
  void symmetrize();

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
/// D·A: scales row i of A by d_i.
Matrix operator*(const DiagonalMatrix& d, const Matrix& a);
/// A·D: scales column j of A by d_j.
Matrix operator*(const Matrix& a, const DiagonalMatrix& d);
DiagonalMatrix operator*(const DiagonalMatrix& a, const DiagonalMatrix& b);
Vector operator*(const DiagonalMatrix& d, Vector x);

/// A·Bᵀ without forming the transpose.
Matrix multiply_transposed(const Matrix& a, const Matrix& b);
/// Aᵀ·B without forming the transpose.
Matrix transposed_multiply(const Matrix& a, const Matrix& b);

}  // namespace ifsm
