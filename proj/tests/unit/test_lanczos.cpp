#include "doctest.h"
#include "qgld/lanczos/rqbl.hpp"
#include "test_support.hpp"

using namespace testsupport;
namespace lz = qgld::lanczos;
namespace la = qgld::linalg;

namespace {

const ComplexMatrix kSx{{0.0, 1.0}, {1.0, 0.0}};
const ComplexMatrix kSz{{1.0, 0.0}, {0.0, -1.0}};

double top_abs_eigenvalue(const ComplexMatrix& x) {
  const auto e = la::eig_hermitian(x);
  return std::abs(e.values.front()) > std::abs(e.values.back()) ? e.values.front() : e.values.back();
}

}  // namespace

TEST_CASE("rqbl_init") {
  const auto v = lz::rqbl_init(4, 1, 3);
  CHECK(v.cols() == 1);
  CHECK(qgld::norm2(v.matrix().column(0)) == doctest::Approx(1.0).epsilon(1e-12));
  const auto q = lz::rqbl_init(8, 2, 3);
  CHECK(la::OrthonormalBlock::orthonormality_error(q.matrix()) <= 1e-12);
  CHECK(lz::rqbl_init(8, 2, 3).matrix() == q.matrix());
  CHECK_FALSE(lz::rqbl_init(8, 2, 4).matrix() == q.matrix());
}

TEST_CASE("rqbl_step on an invariant subspace breaks down") {
  const std::vector<double> d{4.0, 3.0, 2.0, 1.0};
  const ComplexMatrix x = ComplexMatrix::diagonal(std::span<const double>(d));
  const std::vector<la::OrthonormalBlock> prev{la::OrthonormalBlock(ComplexMatrix::identity(4).columns(0, 2))};
  const auto r = lz::rqbl_step(x, prev, ComplexMatrix{});
  CHECK(r.breakdown);
  CHECK(r.next.empty());
  CHECK(max_abs_diff(r.a, ComplexMatrix{{4.0, 0.0}, {0.0, 3.0}}) < 1e-14);
}

TEST_CASE("rqbl_step by hand on sigma-x") {
  ComplexMatrix psi0(2, 1);
  psi0(0, 0) = 1.0;
  std::vector<la::OrthonormalBlock> prev{la::OrthonormalBlock(psi0)};
  const auto r = lz::rqbl_step(kSx, prev, ComplexMatrix{});
  REQUIRE_FALSE(r.breakdown);
  CHECK(std::abs(r.a(0, 0)) < 1e-15);
  CHECK(std::abs(r.b(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(r.next(0, 0)) < 1e-12);
  CHECK(std::abs(r.next(1, 0) - 1.0) < 1e-12);
}

TEST_CASE("each new block is orthogonal to all previous ones") {
  Xoshiro256 rng(61);
  const ComplexMatrix x = random_hermitian(24, rng);
  const auto f = lz::rqbl_factorize(x, 3, 6, 9);
  REQUIRE(f.steps() == 6);
  for (std::size_t p = 1; p < f.steps(); ++p)
    for (std::size_t q = 0; q < p; ++q) {
      const ComplexMatrix g = qgld::adjoint_times(f.basis_blocks[p].matrix(), f.basis_blocks[q].matrix());
      CHECK(g.max_abs() <= 1e-10);
    }
  for (double h : f.orthonormality_history) CHECK(h <= 1e-8);
  CHECK(la::OrthonormalBlock::orthonormality_error(f.basis()) <= 1e-8);
  for (std::size_t p = 0; p < f.steps(); ++p) {
    const ComplexMatrix& psi = f.basis_blocks[p].matrix();
    CHECK(max_abs_diff(f.a_blocks[p], qgld::adjoint_times(psi, x * psi)) <= 1e-10);
  }
}

TEST_CASE("tridiagonal assembly") {
  Xoshiro256 rng(62);
  const ComplexMatrix x = random_hermitian(12, rng);
  const auto f = lz::rqbl_factorize(x, 2, 4, 5);
  const ComplexMatrix s = lz::assemble_tridiagonal(f);
  CHECK(s.rows() == 8);
  CHECK(s.is_hermitian());
  CHECK(max_abs_diff(s.columns(0, 2), s.columns(0, 2)) == 0.0);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      const auto br = r / 2;
      const auto bc = c / 2;
      if (br > bc + 1 || bc > br + 1) CHECK(s(r, c) == cplx(0.0));
    }
  CHECK(std::abs(s(2, 0) - f.b_blocks[0](0, 0)) < 1e-15);
  // S = Q^dagger X Q on the Krylov basis.
  const ComplexMatrix q = f.basis();
  CHECK(max_abs_diff(s, qgld::adjoint_times(q, x * q)) <= 1e-10);
}

TEST_CASE("assemble_and_solve examples") {
  Xoshiro256 rng(63);
  const ComplexMatrix x = random_hermitian(6, rng);
  const auto full = lz::run_rqbl(x, 6, 1, 1);
  const auto e = la::eig_hermitian(x);
  std::vector<double> got = full.values;
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(got[i] - e.values[i]) <= 1e-10);

  const auto sx = lz::run_rqbl(kSx, 1, 2, 4);
  REQUIRE(sx.size() == 2);
  CHECK(sx.values[0] == doctest::Approx(1.0));
  CHECK(sx.values[1] == doctest::Approx(-1.0));

  const ComplexMatrix u = uniform_symmetric(64, rng);
  const auto r = lz::run_rqbl(u, 2, 12, 7);
  CHECK(std::abs(r.values[0] - top_abs_eigenvalue(u)) < 1e-8);
}

TEST_CASE("run_rqbl ordering and determinism") {
  const auto z = lz::run_rqbl(kSz, 1, 2, 3);
  REQUIRE(z.size() == 2);
  CHECK(z.values[0] == doctest::Approx(1.0));
  CHECK(z.values[1] == doctest::Approx(-1.0));

  const std::vector<double> d{10.0, 1.0, 0.1, 0.01};
  const ComplexMatrix x = ComplexMatrix::diagonal(std::span<const double>(d));
  const auto r = lz::run_rqbl(x, 1, 4, 11);
  CHECK(std::abs(r.values[0] - 10.0) < 1e-9);

  Xoshiro256 rng(64);
  const ComplexMatrix h = random_hermitian(16, rng);
  const auto a = lz::run_rqbl(h, 2, 4, 99);
  const auto b = lz::run_rqbl(h, 2, 4, 99);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
  CHECK(a.residuals == b.residuals);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(std::abs(a.values[i - 1]) >= std::abs(a.values[i]));

  CHECK_THROWS_AS(lz::run_rqbl(h, 4, 5, 1), qgld::Error);
  CHECK_THROWS_AS(lz::run_rqbl(h, 0, 1, 1), qgld::Error);
}

TEST_CASE("Ritz pairs: residuals, normalization and spectrum containment") {
  Xoshiro256 rng(65);
  for (std::size_t n : {8u, 20u, 33u}) {
    const ComplexMatrix x = random_hermitian(n, rng);
    const auto e = la::eig_hermitian(x);
    const auto r = lz::run_rqbl(x, 2, n / 4, 5);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const CVector v = r.vector(i);
      CHECK(qgld::norm2(v) == doctest::Approx(1.0).epsilon(1e-10));
      CVector res = x * v;
      for (std::size_t j = 0; j < n; ++j) res[j] -= r.values[i] * v[j];
      CHECK(std::abs(qgld::norm2(res) - r.residuals[i]) <= 1e-10 * x.frobenius_norm());
      CHECK(r.values[i] >= e.values.front() - 1e-8);
      CHECK(r.values[i] <= e.values.back() + 1e-8);
    }
  }
}

TEST_CASE("convergence on a geometric spectrum") {
  Xoshiro256 rng(66);
  const ComplexMatrix x = geometric_spectrum(128, rng);
  double prev = 1e300;
  double at16 = 1e300;
  for (std::size_t k = 1; k <= 24; ++k) {
    const auto r = lz::run_rqbl(x, 1, k, 12);
    const double err = std::abs(r.values[0] - 1.0);
    CAPTURE(k);
    CHECK(err <= prev + 1e-13);
    prev = err;
    if (k == 16) at16 = err;
  }
  CHECK(at16 < 1e-8);
}

TEST_CASE("exhausting the space stops with breakdown") {
  Xoshiro256 rng(67);
  const ComplexMatrix x = random_hermitian(6, rng);
  const auto f = lz::rqbl_factorize(x, 2, 3, 1);
  CHECK(f.steps() == 3);
  CHECK(f.b_blocks.size() == 2);
  const auto g = lz::rqbl_factorize(ComplexMatrix::identity(6), 2, 3, 1);
  CHECK(g.breakdown);
  CHECK(g.steps() == 1);
}

TEST_CASE("json") {
  const auto f = lz::rqbl_factorize(kSx, 1, 2, 1);
  const auto j = lz::to_json(f);
  CHECK(j["A"].size() == 2);
  CHECK(j["B"].size() == 1);
  CHECK(j["Psi"].size() == 2);
  const auto r = lz::to_json(lz::run_rqbl(kSx, 1, 2, 1));
  CHECK(r["values"].size() == 2);
}
