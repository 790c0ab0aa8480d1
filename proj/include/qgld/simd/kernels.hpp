#pragma once

// Complex-double inner loops shared by the matrix and statevector code.
//
// Every kernel has a portable scalar reference in kernels_scalar.cpp and, on
// x86-64, an AVX2/FMA variant in kernels_avx2.cpp. The variant is picked once
// at startup from CPUID; QGLD_SIMD=scalar in the environment forces the
// reference path. The two paths agree to rounding (FMA contraction differs),
// not bitwise; see tests/unit/test_simd.cpp.

#include <complex>
#include <cstddef>
#include <string_view>

namespace qgld::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // sum conj(x[i]) * y[i]
  cplx (*dotc)(const cplx* x, const cplx* y, std::size_t n);
  // sum |x[i]|^2
  double (*norm_sq)(const cplx* x, std::size_t n);
  // x[i] *= a
  void (*scale)(cplx a, cplx* x, std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols);
  // (lo, hi) <- (s (lo + w hi), s (lo - w hi))
  void (*butterfly)(cplx* lo, cplx* hi, cplx w, double s, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa) noexcept;

bool isa_supported(Isa isa) noexcept;

const KernelTable& active() noexcept;

// Overrides the runtime choice; throws qgld::Error if unsupported.
void set_active(Isa isa);

std::string_view isa_name(Isa isa) noexcept;

inline void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) { active().axpy(a, x, y, n); }
inline cplx dotc(const cplx* x, const cplx* y, std::size_t n) { return active().dotc(x, y, n); }
inline double norm_sq(const cplx* x, std::size_t n) { return active().norm_sq(x, n); }
inline void scale(cplx a, cplx* x, std::size_t n) { active().scale(a, x, n); }
inline void gemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols) {
  active().gemv(a, x, y, rows, cols);
}
inline void butterfly(cplx* lo, cplx* hi, cplx w, double s, std::size_t n) {
  active().butterfly(lo, hi, w, s, n);
}

namespace detail {
const KernelTable* avx2_table() noexcept;
}

}  // namespace qgld::simd
