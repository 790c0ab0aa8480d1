#pragma once

// Gradient phase estimation: perturb X along a hermitian direction Delta in
// M = 2^m steps, kick the eigenvalue shifts back onto the deviation register
// and read the directional derivative of one eigenvalue off it.
//
// Off-diagonal directions are symmetric: element(i, j) with i != j puts ones
// at (i, j) and (j, i), so the derivative it measures is the sum of the two
// entry derivatives, not either one alone.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qgld/linalg/matrix.hpp"

namespace qgld::gpe {

enum class DeltaKind { element, all_ones, outer, custom };

struct PerturbationDirection {
  DeltaKind kind = DeltaKind::custom;
  ComplexMatrix matrix;
};

namespace delta {
struct Element {
  std::size_t i = 0;  // zero-based
  std::size_t j = 0;
};
struct AllOnes {};
struct Outer {
  CVector phi;  // entry (i, j) = conj(phi_i) phi_j
};
struct Custom {
  ComplexMatrix matrix;
};
}  // namespace delta

using DeltaSpec = std::variant<delta::Element, delta::AllOnes, delta::Outer, delta::Custom>;

// Errors: IndexOutOfRange, UnnormalizedPhi, NonHermitianInput (custom).
PerturbationDirection build_delta(const DeltaSpec& spec, std::size_t n);

enum class Shift { unshifted, centered };

struct GradientEncoding {
  double L = 1e-6;  // linearization length
  double W = 1.0;   // largest anticipated |gradient| scale
  unsigned m = 1;   // deviation qubits
  Shift shift = Shift::unshifted;
  bool prefactor_2pi = false;

  // Throws InvalidArgument unless 0 < L <= 1e-2, W > 0, 1 <= m <= 12.
  void validate() const;

  std::size_t deviations() const noexcept { return std::size_t{1} << m; }
  // s(eps): L eps / M, or (L / M)(eps - M / 2) when centered.
  double deviation(std::size_t eps) const noexcept;
  // t in exp(i t H(eps)): M / (W L), times 2 pi with prefactor_2pi.
  double time() const noexcept;
  // Deviation-register phase per eps step per unit gradient.
  double phase_per_gradient() const noexcept;
};

// Scale that keeps |gradient| / W <= 1: the spectral norm of Delta, which
// bounds every eigenvalue derivative along it.
double suggest_gradient_scale(const ComplexMatrix& delta);

// Member eps is exp(i t (X + s(eps) Delta)).
std::vector<ComplexMatrix> evolution_family(const ComplexMatrix& x, const ComplexMatrix& delta,
                                            const GradientEncoding& enc);

struct QgpeOutcome {
  std::vector<double> distribution;  // deviation register marginals
  std::size_t peak_index = 0;
  double peak_gradient = 0.0;
  // 2 arccos(sqrt(p0)) scaled to gradient units; m = 1 only. Magnitude only.
  std::optional<double> amplitude_gradient;
  // Signed gradient from the amplitudes after undoing the preparation:
  // phase of a_1 / a_0, a_eps being the pre-QFT deviation amplitudes on the
  // prepared state.
  double signed_gradient = 0.0;
  // ||X p - (p^dagger X p) p||; large values mean p was not an eigenvector.
  double eigenresidual = 0.0;
};

QgpeOutcome qgpe_run(const ComplexMatrix& x, std::span<const cplx> p_state, const ComplexMatrix& delta,
                     const GradientEncoding& enc);

// 2 arccos(sqrt(p0)) W. Errors: ProbabilityOutOfRange if p0, p1 are not a
// distribution to 1e-8.
double extract_gradient_m1(double p0, double p1, double w);

// Argmax bin mapped to a gradient; ties go to the lowest index. Centered
// encodings read bins above M/2 as negative. Throws FlatDistribution when the
// top probability is below 2 / M.
double extract_gradient_peak(std::span<const double> distribution, const GradientEncoding& enc);

// Phase of a_1 / a_0 from post-inverse-QFT amplitudes c_j on the prepared
// state, where a = forward DFT of c.
double phase_from_amplitudes(std::span<const cplx> c);

}  // namespace qgld::gpe
