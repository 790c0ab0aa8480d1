#include "qgld/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define QGLD_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define QGLD_HAVE_AVX2_KERNELS 0
#endif

namespace qgld::simd::detail {

#if QGLD_HAVE_AVX2_KERNELS

#define QGLD_AVX2 __attribute__((target("avx2,fma")))

namespace {

// Two complex doubles per register: [re0, im0, re1, im1].

// a * x with a broadcast.
QGLD_AVX2 inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

// Lane-wise a * x.
QGLD_AVX2 inline __m256d cmul(__m256d a, __m256d x) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0b1111);
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

QGLD_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

QGLD_AVX2 void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_bcast(ar, ai, xv)));
  }
  for (; i < n; ++i) {
    const double xr = xd[2 * i];
    const double xi = xd[2 * i + 1];
    yd[2 * i] += a.real() * xr - a.imag() * xi;
    yd[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

QGLD_AVX2 cplx dotc_avx2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  // acc_re lanes: xr*yr, xi*yi ; acc_im lanes: xr*yi, xi*yr
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
  }
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  double re = hsum(acc_re);
  double im = hsum(_mm256_mul_pd(acc_im, sign));
  for (; i < n; ++i) {
    const double xr = xd[2 * i];
    const double xi = xd[2 * i + 1];
    const double yr = yd[2 * i];
    const double yi = yd[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

QGLD_AVX2 double norm_sq_avx2(const cplx* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += xd[2 * i] * xd[2 * i] + xd[2 * i + 1] * xd[2 * i + 1];
  return s;
}

QGLD_AVX2 void scale_avx2(cplx a, cplx* x, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    _mm256_storeu_pd(xd + 2 * i, cmul_bcast(ar, ai, xv));
  }
  for (; i < n; ++i) {
    const double xr = xd[2 * i];
    const double xi = xd[2 * i + 1];
    xd[2 * i] = a.real() * xr - a.imag() * xi;
    xd[2 * i + 1] = a.real() * xi + a.imag() * xr;
  }
}

QGLD_AVX2 void gemv_avx2(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols) {
  const double* xd = reinterpret_cast<const double*>(x);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* ad = reinterpret_cast<const double*>(a + r * cols);
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2) {
      acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(ad + 2 * c), _mm256_loadu_pd(xd + 2 * c)));
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    alignas(16) double s[2];
    _mm_store_pd(s, _mm_add_pd(lo, hi));
    for (; c < cols; ++c) {
      const double ar = ad[2 * c];
      const double ai = ad[2 * c + 1];
      s[0] += ar * xd[2 * c] - ai * xd[2 * c + 1];
      s[1] += ar * xd[2 * c + 1] + ai * xd[2 * c];
    }
    y[r] = {s[0], s[1]};
  }
}

QGLD_AVX2 void butterfly_avx2(cplx* lo, cplx* hi, cplx w, double s, std::size_t n) {
  double* ld = reinterpret_cast<double*>(lo);
  double* hd = reinterpret_cast<double*>(hi);
  const __m256d wr = _mm256_set1_pd(w.real());
  const __m256d wi = _mm256_set1_pd(w.imag());
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(ld + 2 * i);
    const __m256d t = cmul_bcast(wr, wi, _mm256_loadu_pd(hd + 2 * i));
    _mm256_storeu_pd(ld + 2 * i, _mm256_mul_pd(sv, _mm256_add_pd(a, t)));
    _mm256_storeu_pd(hd + 2 * i, _mm256_mul_pd(sv, _mm256_sub_pd(a, t)));
  }
  for (; i < n; ++i) {
    const double hr = hd[2 * i];
    const double hi_ = hd[2 * i + 1];
    const double tr = w.real() * hr - w.imag() * hi_;
    const double ti = w.real() * hi_ + w.imag() * hr;
    const double ar = ld[2 * i];
    const double ai = ld[2 * i + 1];
    ld[2 * i] = s * (ar + tr);
    ld[2 * i + 1] = s * (ai + ti);
    hd[2 * i] = s * (ar - tr);
    hd[2 * i + 1] = s * (ai - ti);
  }
}

const KernelTable kAvx2{
    Isa::avx2, axpy_avx2, dotc_avx2, norm_sq_avx2, scale_avx2, gemv_avx2, butterfly_avx2,
};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

#else

const KernelTable* avx2_table() noexcept { return nullptr; }

#endif

}  // namespace qgld::simd::detail
