#include "ifsm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ifsm/errors.hpp"

namespace ifsm {

namespace {

bool finite_range(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  if (!all_finite()) throw NonFinite("Vector: non-finite entry");
}

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
  if (!all_finite()) throw NonFinite("Vector: non-finite entry");
}

double Vector::norm() const { return std::sqrt(dot(*this)); }

double Vector::dot(const Vector& other) const {
  if (dim() != other.dim()) throw ShapeMismatch("Vector::dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * other.data_[i];
  return s;
}

bool Vector::all_finite() const { return finite_range(data_); }

Vector& Vector::operator+=(const Vector& other) {
  if (dim() != other.dim()) throw ShapeMismatch("Vector::+=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  if (dim() != other.dim()) throw ShapeMismatch("Vector::-=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }

// -------------------------------------------------------- DiagonalMatrix

DiagonalMatrix::DiagonalMatrix(std::vector<double> values) : diag_(std::move(values)) {
  if (!finite_range(diag_)) throw NonFinite("DiagonalMatrix: non-finite entry");
}

DiagonalMatrix DiagonalMatrix::inverse() const {
  DiagonalMatrix out(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (diag_[i] == 0.0) throw SingularMatrix("DiagonalMatrix::inverse: zero diagonal entry");
    out.diag_[i] = 1.0 / diag_[i];
  }
  return out;
}

DiagonalMatrix DiagonalMatrix::squared() const { return *this * *this; }

double DiagonalMatrix::norm() const {
  double s = 0.0;
  for (double v : diag_) s += v * v;
  return std::sqrt(s);
}

DiagonalMatrix operator*(const DiagonalMatrix& a, const DiagonalMatrix& b) {
  if (a.dim() != b.dim()) throw ShapeMismatch("DiagonalMatrix product: dimension mismatch");
  DiagonalMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vector operator*(const DiagonalMatrix& d, Vector x) {
  if (d.dim() != x.dim()) throw ShapeMismatch("DiagonalMatrix*Vector: dimension mismatch");
  for (std::size_t i = 0; i < d.dim(); ++i) x[i] *= d[i];
  return x;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw ShapeMismatch("Matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                        std::to_string(data_.size()));
  }
  if (!all_finite()) throw NonFinite("Matrix: non-finite entry");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeMismatch("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw NonFinite("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::from_diagonal(const DiagonalMatrix& d) {
  Matrix out(d.dim(), d.dim());
  for (std::size_t i = 0; i < d.dim(); ++i) out(i, i) = d[i];
  return out;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return {};
  Matrix out(columns.front().dim(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) out.set_column(j, columns[j]);
  return out;
}

Matrix Matrix::from_rows(std::span<const Vector> rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().dim();
  Matrix out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dim() != cols) throw ShapeMismatch("Matrix::from_rows: ragged rows");
    std::copy(rows[i].values().begin(), rows[i].values().end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::outer(const Vector& a, const Vector& b) {
  Matrix out(a.dim(), b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out(i, j) = a[i] * b[j];
  return out;
}

Vector Matrix::row_vector(std::size_t i) const {
  Vector out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
  return out;
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Matrix::set_column(std::size_t j, const Vector& v) {
  if (v.dim() != rows_) throw ShapeMismatch("Matrix::set_column: dimension mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

DiagonalMatrix Matrix::diagonal() const {
  const std::size_t n = std::min(rows_, cols_);
  DiagonalMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(i, i);
  return out;
}

double Matrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::all_finite() const { return finite_range(data_); }

double Matrix::asymmetry() const {
  if (!is_square()) throw ShapeMismatch("Matrix::asymmetry: matrix is not square");
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const double d = (*this)(i, j) - (*this)(j, i);
      s += 2.0 * d * d;
    }
  return std::sqrt(s);
}

void Matrix::symmetrize() {
  if (!is_square()) throw ShapeMismatch("Matrix::symmetrize: matrix is not square");
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const double avg = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = avg;
      (*this)(j, i) = avg;
    }
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "Matrix::+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "Matrix::-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("Matrix product: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != x.dim()) throw ShapeMismatch("Matrix*Vector: dimension mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
    out[i] = s;
  }
  return out;
}

Matrix operator*(const DiagonalMatrix& d, const Matrix& a) {
  if (d.dim() != a.rows()) throw ShapeMismatch("DiagonalMatrix*Matrix: dimension mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double& v : out.row(i)) v *= d[i];
  return out;
}

Matrix operator*(const Matrix& a, const DiagonalMatrix& d) {
  if (d.dim() != a.cols()) throw ShapeMismatch("Matrix*DiagonalMatrix: dimension mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] *= d[j];
  }
  return out;
}

Matrix multiply_transposed(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeMismatch("multiply_transposed: dimension mismatch");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto br = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

Matrix transposed_multiply(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeMismatch("transposed_multiply: dimension mismatch");
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto ar = a.row(k);
    const auto br = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ar[i];
      if (aki == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * br[j];
    }
  }
  return out;
}

}  // namespace ifsm
