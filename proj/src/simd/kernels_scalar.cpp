#include "qgld/simd/kernels.hpp"

namespace qgld::simd {
namespace {

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cplx dotc_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm_sq_scalar(const cplx* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(x[i]);
  return acc;
}

void scale_scalar(cplx a, cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void gemv_scalar(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const cplx* row = a + r * cols;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      re += row[c].real() * x[c].real() - row[c].imag() * x[c].imag();
      im += row[c].real() * x[c].imag() + row[c].imag() * x[c].real();
    }
    y[r] = {re, im};
  }
}

void butterfly_scalar(cplx* lo, cplx* hi, cplx w, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx t = w * hi[i];
    const cplx a = lo[i];
    lo[i] = s * (a + t);
    hi[i] = s * (a - t);
  }
}

constexpr KernelTable kScalar{
    Isa::scalar, axpy_scalar, dotc_scalar, norm_sq_scalar, scale_scalar, gemv_scalar, butterfly_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace qgld::simd
