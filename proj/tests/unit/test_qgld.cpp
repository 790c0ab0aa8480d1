#include <cstdlib>
#include <numbers>

#include "doctest.h"
#include "qgld/algo/qgld.hpp"
#include "test_support.hpp"

using namespace testsupport;
namespace algo = qgld::algo;
namespace gpe = qgld::gpe;
namespace la = qgld::linalg;

namespace {

const double kR = 1.0 / std::numbers::sqrt2;
const ComplexMatrix kSx{{0.0, 1.0}, {1.0, 0.0}};
const ComplexMatrix kSz{{1.0, 0.0}, {0.0, -1.0}};
const CVector kPlus{kR, kR};

ComplexMatrix diag(std::vector<double> d) { return ComplexMatrix::diagonal(std::span<const double>(d)); }

algo::InverseExpectationRequest request(const ComplexMatrix& x, const CVector& phi, double L = 1e-6) {
  algo::InverseExpectationRequest r;
  r.x = x;
  r.phi = phi;
  r.k = x.rows();
  r.enc.L = L;
  return r;
}

}  // namespace

TEST_CASE("logdet gradient entries") {
  const gpe::GradientEncoding enc;
  CHECK(std::abs(algo::logdet_gradient_entry(kSx, 0, 1, 1, enc) - 1.0) <= 2e-6);
  CHECK(std::abs(algo::logdet_gradient_entry(kSz, 0, 1, 2, enc)) <= 2e-6);
  CHECK(std::abs(algo::logdet_gradient_entry(diag({2.0, 4.0}), 0, 0, 2, enc) - 0.5) <= 2e-6);
  CHECK(std::abs(algo::logdet_gradient_entry(kSz, 1, 1, 2, enc) + 1.0) <= 2e-6);
}

TEST_CASE("logdet gradient entries recover the inverse") {
  Xoshiro256 rng(71);
  const gpe::GradientEncoding enc;
  for (std::size_t n : {2u, 4u}) {
    const ComplexMatrix x = random_nonsingular(n, rng);
    const ComplexMatrix y = la::inverse(x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double expect = i == j ? y(i, i).real() : (y(i, j) + y(j, i)).real();
        CHECK(std::abs(algo::logdet_gradient_entry(x, i, j, n, enc) - expect) <= 1e-4);
      }
  }
}

TEST_CASE("expectation examples") {
  const auto z = algo::qgld_expectation(request(kSz, kPlus));
  CHECK(std::abs(z.total) <= 2e-6);
  REQUIRE(z.classical_reference.has_value());
  CHECK(std::abs(*z.classical_reference) <= 1e-12);

  Xoshiro256 rng(72);
  const auto id = algo::qgld_expectation(request(ComplexMatrix::identity(4), random_unit(4, rng)));
  CHECK(std::abs(id.total - 1.0) <= 2e-6);

  const ComplexMatrix x = random_spd(8, rng);
  const CVector phi = random_unit(8, rng);
  const auto r = algo::qgld_expectation(request(x, phi, 1e-5));
  CHECK(std::abs(r.total - algo::classical_reference_expectation(x, phi)) <= 1e-4);
  REQUIRE(r.contributions.size() == 8);
  double sum = 0.0;
  for (const auto& c : r.contributions) sum += c.yp;
  CHECK(sum == r.total);
}

TEST_CASE("contributions are ordered by relevance and match Hellmann-Feynman") {
  Xoshiro256 rng(73);
  const ComplexMatrix x = random_nonsingular(8, rng);
  const CVector phi = random_unit(8, rng);
  const auto r = algo::qgld_expectation(request(x, phi));
  const ComplexMatrix delta = qgld::outer_conj_first(phi).conj();
  for (std::size_t i = 0; i < r.contributions.size(); ++i) {
    const auto& c = r.contributions[i];
    if (i > 0) CHECK(std::abs(r.contributions[i - 1].energy) >= std::abs(c.energy));
    CHECK(c.eigenresidual <= 1e-10 * x.frobenius_norm());
    const auto e = la::eig_hermitian(x);
    const auto it = std::min_element(e.values.begin(), e.values.end(),
                                     [&](double a, double b) { return std::abs(a - c.energy) < std::abs(b - c.energy); });
    const auto p = static_cast<std::size_t>(it - e.values.begin());
    CHECK(std::abs(c.delta_energy - la::directional_eigen_derivative(x, delta, p)) <= 1e-5);
    CHECK(c.yp == doctest::Approx(c.delta_energy / c.energy));
    REQUIRE(c.delta_energy_magnitude.has_value());
    CHECK(std::abs(*c.delta_energy_magnitude - std::abs(c.delta_energy)) <= 1e-5);
  }
}

TEST_CASE("inverse consistency with linear error in L") {
  Xoshiro256 rng(74);
  for (std::size_t n : {2u, 4u, 8u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const ComplexMatrix x = random_nonsingular(n, rng);
      const CVector phi = random_unit(n, rng);
      const double ref = algo::classical_reference_expectation(x, phi);
      CHECK(std::abs(algo::qgld_expectation(request(x, phi)).total - ref) <= 1e-4);
      std::vector<double> err;
      for (double L : {1e-2, 1e-3, 1e-4}) err.push_back(std::abs(algo::qgld_expectation(request(x, phi, L)).total - ref));
      CAPTURE(n);
      CAPTURE(err[0]);
      CAPTURE(err[1]);
      CAPTURE(err[2]);
      CHECK(err[0] / err[1] >= 5.0);
      CHECK(err[0] / err[1] <= 20.0);
      CHECK(err[1] / err[2] >= 5.0);
      CHECK(err[1] / err[2] <= 20.0);
    }
  }
}

TEST_CASE("rank truncation stays within the spectral tail") {
  Xoshiro256 rng(75);
  const std::size_t n = 8;
  const ComplexMatrix x = geometric_spectrum(n, rng);
  const CVector phi = random_unit(n, rng);
  const auto e = la::eig_hermitian(x);
  auto req = request(x, phi, 1e-8);
  const double full = algo::qgld_expectation(req).total;
  for (std::size_t k = 1; k < n; ++k) {
    req.k = k;
    const double trunc = algo::qgld_expectation(req).total;
    // Ascending order: the n - k smallest eigenvalues are dropped.
    double tail = 0.0;
    for (std::size_t p = 0; p < n - k; ++p) tail += std::norm(qgld::dotc(e.vector(p), phi)) / e.values[p];
    CAPTURE(k);
    CHECK(std::abs(trunc - full) <= tail + 1e-4);
  }
}

TEST_CASE("Lanczos eigensource") {
  Xoshiro256 rng(76);
  const ComplexMatrix x = random_spd(8, rng);
  const CVector phi = random_unit(8, rng);
  auto req = request(x, phi);
  req.source = algo::RqblEigensource{2, 0, 5};
  const auto r = algo::qgld_expectation(req);
  CHECK(std::abs(r.total - algo::classical_reference_expectation(x, phi)) <= 1e-4);
  for (const auto& c : r.contributions) CHECK(c.eigensolver_residual <= 1e-6 * x.frobenius_norm());
}

TEST_CASE("near-zero eigenvalues") {
  const ComplexMatrix x = diag({1.0, 0.0});
  CHECK(code_of([&] { algo::qgld_expectation(request(x, kPlus)); }) == qgld::ErrorCode::NearZeroEigenvalue);
  auto req = request(x, kPlus);
  req.pseudo_inverse = true;
  req.with_reference = false;
  const auto r = algo::qgld_expectation(req);
  CHECK(std::abs(r.total - 0.5) <= 2e-6);
  int skipped = 0;
  for (const auto& c : r.contributions) skipped += c.skipped ? 1 : 0;
  CHECK(skipped == 1);
}

TEST_CASE("request validation") {
  auto req = request(kSx, CVector{1.0, 1.0});
  CHECK(code_of([&] { algo::qgld_expectation(req); }) == qgld::ErrorCode::UnnormalizedPhi);
  req = request(kSx, kPlus);
  req.k = 3;
  CHECK_THROWS_AS(algo::qgld_expectation(req), qgld::Error);
  const ComplexMatrix nh{{1.0, 2.0}, {0.0, 1.0}};
  CHECK(code_of([&] { algo::classical_reference_expectation(nh, kPlus); }) == qgld::ErrorCode::NonHermitianInput);
  CHECK(code_of([&] { algo::classical_reference_expectation(diag({1.0, 0.0}), kPlus); }) ==
        qgld::ErrorCode::SingularMatrix);
}

TEST_CASE("classical reference") {
  Xoshiro256 rng(77);
  CHECK(algo::classical_reference_expectation(ComplexMatrix::identity(3), random_unit(3, rng)) == doctest::Approx(1.0));
  CHECK(std::abs(algo::classical_reference_expectation(kSz, kPlus)) < 1e-15);
  const ComplexMatrix x = random_spd(16, rng);
  const CVector phi = random_unit(16, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(x));
  double spectral = 0.0;
  for (Eigen::Index p = 0; p < 16; ++p) {
    cplx ov = 0.0;
    for (Eigen::Index i = 0; i < 16; ++i) ov += std::conj(es.eigenvectors()(i, p)) * phi[static_cast<std::size_t>(i)];
    spectral += std::norm(ov) / es.eigenvalues()(p);
  }
  CHECK(std::abs(algo::classical_reference_expectation(x, phi) - spectral) <= 1e-10);
}

TEST_CASE("superposition variant examples") {
  gpe::GradientEncoding enc;
  enc.W = algo::sigma_gradient_scale(kSz, kPlus);
  CHECK(std::abs(algo::sigma_qgld_expectation(kSz, kPlus, enc).total) <= 2e-6);
  const CVector zero{1.0, 0.0};
  enc.W = algo::sigma_gradient_scale(ComplexMatrix::identity(2), zero);
  CHECK(std::abs(algo::sigma_qgld_expectation(ComplexMatrix::identity(2), zero, enc).total - 1.0) <= 2e-6);
  enc.W = algo::sigma_gradient_scale(diag({2.0, 4.0}), kPlus);
  const auto r = algo::sigma_qgld_expectation(diag({2.0, 4.0}), kPlus, enc);
  CHECK(std::abs(r.total - 0.375) <= 2e-6);
  CHECK(r.cancellation_residual <= 1e-10);
  CHECK(r.w == enc.W);
}

TEST_CASE("superposition variant agrees with the per-eigenvector sum") {
  Xoshiro256 rng(78);
  for (std::size_t n : {2u, 4u, 8u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const ComplexMatrix x = random_spd(n, rng);
      const CVector phi = random_unit(n, rng);
      gpe::GradientEncoding enc;
      enc.W = algo::sigma_gradient_scale(x, phi);
      const auto s = algo::sigma_qgld_expectation(x, phi, enc);
      const auto q = algo::qgld_expectation(request(x, phi));
      CHECK(std::abs(s.total - q.total) <= 2e-4);
      CHECK(s.cancellation_residual <= 1e-10);
    }
  }
  const ComplexMatrix x = random_nonsingular(4, rng);
  const CVector phi = random_unit(4, rng);
  gpe::GradientEncoding enc;
  enc.W = algo::sigma_gradient_scale(x, phi);
  CHECK(std::abs(algo::sigma_qgld_expectation(x, phi, enc).total - algo::classical_reference_expectation(x, phi)) <= 2e-4);
}

TEST_CASE("sampled variant") {
  gpe::GradientEncoding enc;
  enc.W = algo::sigma_gradient_scale(ComplexMatrix::identity(4), CVector{1.0, 0.0, 0.0, 0.0});
  const auto id = algo::sampled_qgld(ComplexMatrix::identity(4), CVector{1.0, 0.0, 0.0, 0.0}, 4, 3, enc);
  CHECK(std::abs(id.estimate - 1.0) <= 1e-6);
  CHECK(id.samples.size() == 4);

  const ComplexMatrix x = diag({2.0, 4.0});
  enc.W = algo::sigma_gradient_scale(x, kPlus);
  const auto a = algo::sampled_qgld(x, kPlus, 256, 17, enc);
  const auto b = algo::sampled_qgld(x, kPlus, 256, 17, enc);
  CHECK(a.samples == b.samples);
  CHECK(a.estimate == b.estimate);
  CHECK(std::abs(a.estimate - 0.375) <= 3.0 * a.spread + 1e-6);

  const auto one = algo::sampled_qgld(x, kPlus, 1, 17, enc);
  CHECK(one.spread == 0.0);
  CHECK_THROWS_AS(algo::sampled_qgld(x, kPlus, 0, 17, enc), qgld::Error);
}

TEST_CASE("results do not depend on the worker count") {
  Xoshiro256 rng(79);
  const ComplexMatrix x = random_nonsingular(8, rng);
  const CVector phi = random_unit(8, rng);
  setenv("QGLD_THREADS", "1", 1);
  const auto serial = algo::qgld_expectation(request(x, phi));
  setenv("QGLD_THREADS", "5", 1);
  const auto threaded = algo::qgld_expectation(request(x, phi));
  unsetenv("QGLD_THREADS");
  CHECK(serial.total == threaded.total);
  for (std::size_t i = 0; i < serial.contributions.size(); ++i)
    CHECK(serial.contributions[i].yp == threaded.contributions[i].yp);
}

TEST_CASE("report json") {
  const auto j = algo::to_json(algo::qgld_expectation(request(kSz, kPlus)));
  CHECK(j["contributions"].size() == 2);
  CHECK(j.contains("total"));
  CHECK(j.contains("classical_reference"));
  CHECK(algo::to_json(gpe::GradientEncoding{})["L"] == 1e-6);
}
