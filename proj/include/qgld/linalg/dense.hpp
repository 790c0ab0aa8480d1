#pragma once

// Dense hermitian eigensolver and the classical reference routines the
// quantum pipeline is checked against.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "qgld/linalg/matrix.hpp"

namespace qgld::linalg {

// Relative thresholds. Every routine takes one; defaults are the contract
// values and callers may loosen or tighten them.
struct Tolerances {
  double hermitian = 1e-12;       // relative to max |a_ij|
  double singular_pivot = 1e-13;  // relative to ||A||_F
  double psd_negative = 1e-12;    // relative to ||B2||_F
  double rank = 1e-10;            // smallest / largest singular value
  double degenerate_gap = 1e-8;   // relative to ||A||_F
  double jacobi = 1e-15;          // off-diagonal stopping ratio
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column p pairs with values[p]

  std::size_t size() const noexcept { return values.size(); }
  CVector vector(std::size_t p) const { return vectors.column(p); }
};

// Cyclic complex Jacobi. Eigenvalues ascending; each eigenvector's first
// component with magnitude above 1e-12 is made real and positive.
EigenDecomposition eig_hermitian(const ComplexMatrix& a, const Tolerances& tol = {});

// exp(i t A) via the spectral decomposition.
ComplexMatrix unitary_phase_exp(const ComplexMatrix& a, double t, const Tolerances& tol = {});
ComplexMatrix unitary_phase_exp(const EigenDecomposition& eig, double t);

// Principal-branch ln det A from partial-pivot LU; imaginary part in (-pi, pi].
cplx logdet_lu(const ComplexMatrix& a, const Tolerances& tol = {});

ComplexMatrix inverse(const ComplexMatrix& a, const Tolerances& tol = {});

// Hermitian square root of a positive-semidefinite matrix. Eigenvalues in
// [-psd_negative * ||B2||_F, 0) are clamped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& b2, const Tolerances& tol = {});

// Hermitian pseudo-inverse of a PSD root; eigenvalues at or below
// cutoff * max eigenvalue are dropped.
ComplexMatrix hermitian_pinv(const ComplexMatrix& b, double cutoff = 1e-12);

// Column block with orthonormal columns (the U V^dagger polar factor).
class OrthonormalBlock {
 public:
  // Validates the invariant to `tol`.
  explicit OrthonormalBlock(ComplexMatrix columns, double tol = 1e-12);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }

  // max |Q^dagger Q - I|
  static double orthonormality_error(const ComplexMatrix& q);

 private:
  ComplexMatrix m_;
};

// U V^dagger from the SVD of `block`, computed as block (block^dagger block)^{-1/2}
// and refined once. Throws RankDeficientBlock when sigma_min <= rank * sigma_max.
OrthonormalBlock orthonormalize_svd(const ComplexMatrix& block, const Tolerances& tol = {});

struct HellmannFeynman {};
struct CentralDifference {
  double h = 1e-5;
};
using DerivativeMode = std::variant<HellmannFeynman, CentralDifference>;

// d/ds lambda_p(A + s Delta) at s = 0, p indexing ascending eigenvalues.
// Hellmann-Feynman mode throws DegenerateEigenvalue if lambda_p is within
// degenerate_gap * ||A||_F of a neighbour.
double directional_eigen_derivative(const ComplexMatrix& a, const ComplexMatrix& delta, std::size_t p,
                                    const DerivativeMode& mode = HellmannFeynman{}, const Tolerances& tol = {});

// Degenerate fallback: eigenvalues of Delta restricted to the eigenspace
// containing lambda_p (ascending). A singleton for nondegenerate p.
std::vector<double> degenerate_directional_derivatives(const ComplexMatrix& a, const ComplexMatrix& delta,
                                                       std::size_t p, const Tolerances& tol = {});

// Rotates each cluster of eigenvalues closer than degenerate_gap * ||A||_F so
// that Delta is diagonal inside it. Needed before first-order perturbation
// arguments hold on degenerate spectra.
void adapt_degenerate_basis(EigenDecomposition& eig, const ComplexMatrix& delta, double abs_gap);

}  // namespace qgld::linalg
