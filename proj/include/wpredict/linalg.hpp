#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "wpredict/errors.hpp"

namespace wpredict {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double squared_norm(const Vector& v);
double norm(const Vector& v);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& v, double k);

/// Dense row-major matrix. Small sizes only (desk scale, d <= 64 for the
/// eigensolver, point clouds up to a few thousand rows).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Vector row(std::size_t i) const;
  void set_row(std::size_t i, const Vector& v);

  Matrix transposed() const;
  double trace() const;
  double frobenius_norm() const;

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);

/// Symmetric positive semidefinite matrix. Symmetry is enforced on
/// construction: |A(i,j) - A(j,i)| must stay within 1e-12 * (1 + |A(i,j)|)
/// entrywise, after which the stored copy is exactly symmetrized.
/// Positive semidefiniteness is enforced where eigenvalues are computed
/// (eigh / spd_sqrt): eigenvalues below -1e-10 times the spectral norm are a
/// domain error, small negative round-off is clamped to zero.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(std::size_t dim) : m_(dim, dim, 0.0) {}

  static SpdMatrix identity(std::size_t dim);
  static SpdMatrix diagonal(const Vector& diag);
  static SpdMatrix isotropic(std::size_t dim, double value);
  /// Validates the symmetry invariant; throws DomainError on violation.
  static SpdMatrix from_matrix(const Matrix& a);
  static SpdMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  /// Symmetric assignment: writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double value);

  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

 private:
  Matrix m_;
};

}  // namespace wpredict
