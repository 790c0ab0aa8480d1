#include "qgld/linalg/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qgld/error.hpp"
#include "qgld/simd/kernels.hpp"

namespace qgld {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const CVector> columns) {
  if (columns.empty()) return {};
  ComplexMatrix m(columns.front().size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) m.set_column(c, columns[c]);
  return m;
}

CVector ComplexMatrix::column(std::size_t c) const {
  CVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const cplx> values) {
  if (values.size() != rows_) throw Error(ErrorCode::DimensionMismatch, "column length");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

ComplexMatrix ComplexMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw Error(ErrorCode::IndexOutOfRange, "column range");
  ComplexMatrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_ + first), count, out.row(r).begin());
  }
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out = *this;
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

double ComplexMatrix::frobenius_norm() const noexcept {
  return std::sqrt(simd::norm_sq(data_.data(), data_.size()));
}

double ComplexMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

cplx ComplexMatrix::trace() const noexcept {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::hermiticity_defect() const noexcept {
  if (!square()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j) d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

bool ComplexMatrix::is_hermitian(double rel_tol) const noexcept {
  if (!square() || empty()) return false;
  return hermiticity_defect() <= rel_tol * max_abs();
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(ErrorCode::DimensionMismatch, "matrix sum");
  simd::axpy(1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(ErrorCode::DimensionMismatch, "matrix difference");
  simd::axpy(-1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) noexcept {
  simd::scale(s, data_.data(), data_.size());
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx* ci = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      simd::axpy(aik, b.row(k).data(), ci, n);
    }
  }
  return c;
}

CVector operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  CVector y(a.rows());
  simd::gemv(a.data(), x.data(), y.data(), a.rows(), a.cols());
  return y;
}

ComplexMatrix adjoint_times(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "adjoint product");
  ComplexMatrix c(a.cols(), b.cols());
  // c_ij = sum_k conj(a_ki) b_kj, accumulated row by row of a and b.
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto bk = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const cplx aki = std::conj(a(k, i));
      if (aki == cplx{}) continue;
      simd::axpy(aki, bk.data(), c.row(i).data(), b.cols());
    }
  }
  return c;
}

ComplexMatrix outer_conj_first(std::span<const cplx> phi) {
  ComplexMatrix m(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i)
    for (std::size_t j = 0; j < phi.size(); ++j) m(i, j) = std::conj(phi[i]) * phi[j];
  return m;
}

cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "inner product");
  return simd::dotc(x.data(), y.data(), x.size());
}

double norm2(std::span<const cplx> x) { return std::sqrt(simd::norm_sq(x.data(), x.size())); }

cplx quadratic_form(const ComplexMatrix& a, std::span<const cplx> x) {
  const CVector ax = a * x;
  return dotc(x, ax);
}

double distance_fro(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

}  // namespace qgld
