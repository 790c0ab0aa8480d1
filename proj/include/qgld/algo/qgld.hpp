#pragma once

// Log-determinant gradients and inverse expectation values assembled from
// per-eigenvector phase estimation runs: <Y> = sum_p dE_p / E_p.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qgld/gpe/qgpe.hpp"
#include "qgld/linalg/matrix.hpp"

namespace qgld::algo {

struct DenseEigensource {};
struct RqblEigensource {
  std::size_t b = 1;
  std::size_t steps = 0;  // 0 selects N / b
  std::uint64_t seed = 0;
};
using Eigensource = std::variant<DenseEigensource, RqblEigensource>;

// Eigenpairs ordered most relevant first: |E| descending, ties by E
// descending. Clusters closer than 1e-8 ||X||_F are rotated so that `delta`
// is diagonal inside them.
struct Eigenpairs {
  std::vector<double> values;
  ComplexMatrix vectors;           // N x r
  std::vector<double> residuals;   // ||X v - E v||

  std::size_t size() const noexcept { return values.size(); }
  CVector vector(std::size_t p) const { return vectors.column(p); }
};

Eigenpairs relevant_eigenpairs(const ComplexMatrix& x, const ComplexMatrix& delta, const Eigensource& source);

struct InverseExpectationRequest {
  ComplexMatrix x;
  CVector phi;
  std::size_t k = 0;
  gpe::GradientEncoding enc;
  Eigensource source = DenseEigensource{};
  bool pseudo_inverse = false;   // skip |E_p| <= 1e-10 ||X||_F instead of failing
  bool with_reference = true;    // also compute the LU-based value
};

struct Contribution {
  std::size_t p = 0;
  double energy = 0.0;        // E_p
  double delta_energy = 0.0;  // signed dE_p from the amplitude readout
  std::optional<double> delta_energy_magnitude;  // 2 arccos(sqrt(p0)) readout, m = 1
  double yp = 0.0;            // dE_p / E_p; 0 when skipped
  double eigenresidual = 0.0;
  double eigensolver_residual = 0.0;
  bool skipped = false;
};

struct InverseExpectationReport {
  std::vector<Contribution> contributions;
  double total = 0.0;
  std::optional<double> classical_reference;
  gpe::GradientEncoding enc;
  Eigensource source = DenseEigensource{};
};

// Sum of the k most relevant dE_p / E_p along an arbitrary hermitian delta.
InverseExpectationReport qgld_contributions(const ComplexMatrix& x, const ComplexMatrix& delta, std::size_t k,
                                            const gpe::GradientEncoding& enc, const Eigensource& source,
                                            bool pseudo_inverse);

// d ln det X / dx_ij along element(i, j): (X^-1)_ij + (X^-1)_ji for i != j,
// (X^-1)_ii on the diagonal, at k = N and L -> 0. Indices are zero-based.
double logdet_gradient_entry(const ComplexMatrix& x, std::size_t i, std::size_t j, std::size_t k,
                             const gpe::GradientEncoding& enc, const Eigensource& source = DenseEigensource{},
                             bool pseudo_inverse = false);

// <Phi|X^-1|Phi> through Delta = Phi Phi^dagger.
InverseExpectationReport qgld_expectation(const InverseExpectationRequest& request);

// Re(Phi^dagger inverse(X) Phi). Throws SingularMatrix, NonHermitianInput.
double classical_reference_expectation(const ComplexMatrix& x, std::span<const cplx> phi);

struct SigmaReport {
  double total = 0.0;
  double readout_phase = 0.0;  // arg(z_1 / z_0)
  // Largest |phase| left on any eigenstate after the inverse evolution at
  // eps = 0; should be at rounding level.
  double cancellation_residual = 0.0;
  double w = 0.0;
};

// W that keeps every per-eigenstate phase dE_p / (E_p W) near 1e-4, where the
// single-readout error is far below the linear term.
double sigma_gradient_scale(const ComplexMatrix& x, std::span<const cplx> phi);

// One run on the equal superposition of eigenvectors, each eigenstate kicked
// by s(eps) dE_p / E_p, with exp(-i t X) cancelling the bare eigenphases.
SigmaReport sigma_qgld_expectation(const ComplexMatrix& x, std::span<const cplx> phi, const gpe::GradientEncoding& enc);

struct SampledEstimate {
  double estimate = 0.0;  // mean over samples
  double spread = 0.0;    // sample standard deviation; 0 for one sample
  std::vector<double> samples;
};

// Sigma pipeline started from random states instead of the equal
// superposition. States come in orthonormal batches of N, so any multiple of
// N samples averages the eigenstate weights exactly.
SampledEstimate sampled_qgld(const ComplexMatrix& x, std::span<const cplx> phi, std::size_t n_samples,
                             std::uint64_t rng_seed, const gpe::GradientEncoding& enc);

nlohmann::ordered_json to_json(const InverseExpectationReport& report);
nlohmann::ordered_json to_json(const gpe::GradientEncoding& enc);

}  // namespace qgld::algo
