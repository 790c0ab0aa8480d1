#include <cmath>
#include <vector>

#include "doctest.h"
#include "qgld/error.hpp"
#include "qgld/simd/kernels.hpp"
#include "qgld/util/rng.hpp"

using qgld::cplx;
namespace simd = qgld::simd;

namespace {

std::vector<cplx> random_vec(std::size_t n, qgld::Xoshiro256& rng) {
  std::vector<cplx> v(n);
  for (auto& z : v) z = {qgld::gaussian(rng), qgld::gaussian(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const simd::KernelTable* vector_table() { return simd::table_for(simd::Isa::avx2); }

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(simd::isa_supported(simd::Isa::scalar));
  CHECK(simd::table_for(simd::Isa::scalar) == &simd::scalar_table());
  CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
}

TEST_CASE("scalar kernels on hand values") {
  const auto& t = simd::scalar_table();
  std::vector<cplx> x{{1, 2}, {3, -1}};
  std::vector<cplx> y{{0, 1}, {2, 2}};
  CHECK(t.dotc(x.data(), y.data(), 2) == cplx(1, -2) * cplx(0, 1) + cplx(3, 1) * cplx(2, 2));
  CHECK(t.norm_sq(x.data(), 2) == doctest::Approx(15.0));
  t.axpy({0, 1}, x.data(), y.data(), 2);
  CHECK(y[0] == cplx(-2, 2));
  CHECK(y[1] == cplx(3, 5));
  const cplx a[4] = {{1, 0}, {0, 1}, {2, 0}, {0, 0}};
  cplx out[2];
  t.gemv(a, x.data(), out, 2, 2);
  CHECK(out[0] == cplx(1, 2) + cplx(0, 1) * cplx(3, -1));
  CHECK(out[1] == cplx(2, 4));
  cplx lo[1] = {{1, 0}};
  cplx hi[1] = {{0, 1}};
  t.butterfly(lo, hi, {0, 1}, 0.5, 1);
  CHECK(lo[0] == cplx(0, 0));
  CHECK(hi[0] == cplx(1, 0));
}

TEST_CASE("vector kernels agree with the scalar reference across tail lengths") {
  const auto* v = vector_table();
  if (v == nullptr) {
    MESSAGE("no vector ISA on this machine; equivalence not exercised");
    return;
  }
  const auto& s = simd::scalar_table();
  qgld::Xoshiro256 rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 17u, 31u, 64u, 1000u, 1023u}) {
    CAPTURE(n);
    const auto x = random_vec(n, rng);
    const auto y0 = random_vec(n, rng);
    const cplx a{0.3, -1.7};
    const double tol = 1e-13 * (1.0 + static_cast<double>(n));

    auto ys = y0;
    auto yv = y0;
    s.axpy(a, x.data(), ys.data(), n);
    v->axpy(a, x.data(), yv.data(), n);
    CHECK(max_diff(ys, yv) <= tol);

    CHECK(std::abs(s.dotc(x.data(), y0.data(), n) - v->dotc(x.data(), y0.data(), n)) <= tol);
    CHECK(std::abs(s.norm_sq(x.data(), n) - v->norm_sq(x.data(), n)) <= tol);

    auto xs = x;
    auto xv = x;
    s.scale(a, xs.data(), n);
    v->scale(a, xv.data(), n);
    CHECK(max_diff(xs, xv) <= tol);

    auto ls = x, hs = y0, lv = x, hv = y0;
    s.butterfly(ls.data(), hs.data(), {0.6, 0.8}, 0.7, n);
    v->butterfly(lv.data(), hv.data(), {0.6, 0.8}, 0.7, n);
    CHECK(max_diff(ls, lv) <= tol);
    CHECK(max_diff(hs, hv) <= tol);
  }
}

TEST_CASE("vector gemv agrees with the scalar reference on odd shapes") {
  const auto* v = vector_table();
  if (v == nullptr) return;
  qgld::Xoshiro256 rng(12);
  for (std::size_t rows : {1u, 2u, 3u, 8u, 13u}) {
    for (std::size_t cols : {1u, 2u, 5u, 16u, 33u}) {
      const auto a = random_vec(rows * cols, rng);
      const auto x = random_vec(cols, rng);
      std::vector<cplx> ys(rows), yv(rows);
      simd::scalar_table().gemv(a.data(), x.data(), ys.data(), rows, cols);
      v->gemv(a.data(), x.data(), yv.data(), rows, cols);
      CHECK(max_diff(ys, yv) <= 1e-13 * static_cast<double>(cols + 1));
    }
  }
}

TEST_CASE("runtime selection can be overridden and restored") {
  const simd::Isa before = simd::active().isa;
  simd::set_active(simd::Isa::scalar);
  CHECK(simd::active().isa == simd::Isa::scalar);
  if (simd::isa_supported(simd::Isa::avx2)) {
    simd::set_active(simd::Isa::avx2);
    CHECK(simd::active().isa == simd::Isa::avx2);
  } else {
    CHECK_THROWS_AS(simd::set_active(simd::Isa::avx2), qgld::Error);
  }
  simd::set_active(before);
}
