#include "wpredict/linalg.hpp"

#include <cmath>
#include <cstdio>

namespace wpredict {

namespace {

void require_same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw DomainError(std::string(op) + ": vector sizes differ");
  }
}

}  // namespace

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const Vector& v) { return dot(v, v); }

double norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

Vector add(const Vector& a, const Vector& b) {
  require_same_size(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  require_same_size(a, b, "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scale(const Vector& v, double k) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * k;
  return out;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DomainError("Matrix::from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector Matrix::row(std::size_t i) const {
  Vector v(cols_);
  for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

void Matrix::set_row(std::size_t i, const Vector& v) {
  if (v.size() != cols_) throw DomainError("Matrix::set_row: size mismatch");
  for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  const std::size_t n = rows_ < cols_ ? rows_ : cols_;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (*this)(i, i);
  return s;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DomainError("Matrix multiply: inner dimensions differ");
  Matrix out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw DomainError("matvec: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

SpdMatrix SpdMatrix::identity(std::size_t dim) {
  SpdMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.m_(i, i) = 1.0;
  return s;
}

SpdMatrix SpdMatrix::diagonal(const Vector& diag) {
  SpdMatrix s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.m_(i, i) = diag[i];
  return s;
}

SpdMatrix SpdMatrix::isotropic(std::size_t dim, double value) {
  SpdMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.m_(i, i) = value;
  return s;
}

SpdMatrix SpdMatrix::from_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw DomainError("SpdMatrix: matrix is not square");
  const std::size_t d = a.rows();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double gap = std::fabs(a(i, j) - a(j, i));
      if (gap > 1e-12 * (1.0 + std::fabs(a(i, j)))) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "SpdMatrix: asymmetry %.3e at (%zu,%zu) beyond tolerance",
                      gap, i, j);
        throw DomainError(buf);
      }
    }
  }
  SpdMatrix s(d);
  for (std::size_t i = 0; i < d; ++i) {
    s.m_(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < d; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s.m_(i, j) = v;
      s.m_(j, i) = v;
    }
  }
  return s;
}

SpdMatrix SpdMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  return from_matrix(Matrix::from_rows(rows));
}

void SpdMatrix::set(std::size_t i, std::size_t j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

}  // namespace wpredict
