#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qgld {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Dense row-major complex matrix. Square instances carry X, Delta, Y, K and
// every operator; rectangular ones carry Lanczos blocks.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  explicit ComplexMatrix(std::size_t dim) : ComplexMatrix(dim, dim) {}
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);
  static ComplexMatrix diagonal(std::span<const cplx> values);
  static ComplexMatrix from_columns(std::span<const CVector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  // Side length; only meaningful when square().
  std::size_t dim() const noexcept { return rows_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  cplx* data() noexcept { return data_.data(); }
  const cplx* data() const noexcept { return data_.data(); }
  std::span<cplx> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  CVector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const cplx> values);
  // Columns [first, first + count).
  ComplexMatrix columns(std::size_t first, std::size_t count) const;

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;

  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  cplx trace() const noexcept;

  // max_ij |a_ij - conj(a_ji)| <= rel_tol * max_ij |a_ij|
  bool is_hermitian(double rel_tol = 1e-12) const noexcept;
  double hermiticity_defect() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s) noexcept;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, cplx s);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
CVector operator*(const ComplexMatrix& a, std::span<const cplx> x);

// A^dagger B without forming the adjoint.
ComplexMatrix adjoint_times(const ComplexMatrix& a, const ComplexMatrix& b);

// Entrywise (a_ij = conj(phi_i) phi_j).
ComplexMatrix outer_conj_first(std::span<const cplx> phi);

cplx dotc(std::span<const cplx> x, std::span<const cplx> y);
double norm2(std::span<const cplx> x);
// <x|A|x>
cplx quadratic_form(const ComplexMatrix& a, std::span<const cplx> x);

// ||A - B||_F
double distance_fro(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qgld
