#pragma once

// Random instances and an Eigen bridge for the independent oracles.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "qgld/error.hpp"

#include "qgld/linalg/dense.hpp"
#include "qgld/linalg/matrix.hpp"
#include "qgld/util/rng.hpp"

namespace testsupport {

using qgld::cplx;
using qgld::ComplexMatrix;
using qgld::CVector;
using qgld::Xoshiro256;

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, Xoshiro256& rng, bool complex_entries = true) {
  const ComplexMatrix g = qgld::gaussian_matrix(n, n, rng, complex_entries);
  return (g + g.adjoint()) * cplx{0.5};
}

// Q diag(d) Q^dagger with Haar-like Q.
inline ComplexMatrix with_spectrum(const std::vector<double>& d, Xoshiro256& rng, bool complex_entries = true) {
  const std::size_t n = d.size();
  const ComplexMatrix q =
      qgld::linalg::orthonormalize_svd(qgld::gaussian_matrix(n, n, rng, complex_entries)).matrix();
  const ComplexMatrix x = q * ComplexMatrix::diagonal(std::span<const double>(d)) * q.adjoint();
  return (x + x.adjoint()) * cplx{0.5};
}

// Eigenvalues in [0.5, 3], pairwise at least 0.05 apart.
inline ComplexMatrix random_spd(std::size_t n, Xoshiro256& rng) {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = 0.5 + 2.5 * (static_cast<double>(i) + 0.5 * rng.uniform()) / static_cast<double>(n);
  return with_spectrum(d, rng);
}

// Indefinite, |E| >= 0.5, pairwise separated.
inline ComplexMatrix random_nonsingular(std::size_t n, Xoshiro256& rng) {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = 0.5 + 2.5 * (static_cast<double>(i) + 0.5 * rng.uniform()) / static_cast<double>(n);
    d[i] = rng.uniform() < 0.5 ? -mag : mag;
  }
  return with_spectrum(d, rng);
}

// Real symmetric with independent uniform [0, 1) entries on and above the diagonal.
inline ComplexMatrix uniform_symmetric(std::size_t n, Xoshiro256& rng) {
  ComplexMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) x(i, j) = x(j, i) = rng.uniform();
  return x;
}

// Real symmetric with eigenvalues 2^{-i}, i = 0..n-1.
inline ComplexMatrix geometric_spectrum(std::size_t n, Xoshiro256& rng) {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = std::ldexp(1.0, -static_cast<int>(i));
  return with_spectrum(d, rng, false);
}

inline CVector random_unit(std::size_t n, Xoshiro256& rng) {
  CVector v = qgld::gaussian_matrix(n, 1, rng).column(0);
  const double nv = qgld::norm2(v);
  for (auto& z : v) z /= nv;
  return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

// Code of the qgld::Error thrown by f; fails the test if none is thrown.
inline qgld::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const qgld::Error& e) {
    return e.code();
  }
  FAIL("no qgld::Error thrown");
  return qgld::ErrorCode::Io;
}

}  // namespace testsupport
