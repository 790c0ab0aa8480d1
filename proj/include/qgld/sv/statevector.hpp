#pragma once

// Dense two-register statevector: an m-qubit deviation register on the
// high-order bits and an n-qubit system register on the low-order bits, so
// amplitude (eps, s) lives at eps * N + s and every deviation value owns a
// contiguous system block.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "qgld/linalg/matrix.hpp"

namespace qgld::sv {

struct RegisterLayout {
  unsigned m = 1;  // deviation qubits
  unsigned n = 1;  // system qubits

  static constexpr unsigned kMaxQubits = 26;

  // Throws InvalidArgument unless m >= 1, n >= 1, m + n <= kMaxQubits.
  static RegisterLayout make(unsigned m, unsigned n);
  // System qubits for a power-of-two dimension; throws otherwise.
  static unsigned qubits_for(std::size_t dim);

  std::size_t deviation_size() const noexcept { return std::size_t{1} << m; }
  std::size_t system_size() const noexcept { return std::size_t{1} << n; }
  std::size_t size() const noexcept { return deviation_size() * system_size(); }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

class StateVector {
 public:
  StateVector(RegisterLayout layout, CVector amplitudes);

  const RegisterLayout& layout() const noexcept { return layout_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::span<cplx> amplitudes() noexcept { return amps_; }

  const cplx& amplitude(std::size_t deviation, std::size_t system) const noexcept {
    return amps_[deviation * layout_.system_size() + system];
  }
  std::span<cplx> block(std::size_t deviation) noexcept {
    return {amps_.data() + deviation * layout_.system_size(), layout_.system_size()};
  }
  std::span<const cplx> block(std::size_t deviation) const noexcept {
    return {amps_.data() + deviation * layout_.system_size(), layout_.system_size()};
  }

  double norm() const noexcept;

 private:
  RegisterLayout layout_;
  CVector amps_;
};

// Gamma: a unitary whose first column is the target state, built as a
// phase-adjusted Householder reflection.
class PreparationUnitary {
 public:
  // Throws UnnormalizedTarget unless | ||v|| - 1 | <= 1e-10.
  static PreparationUnitary from_target(std::span<const cplx> v);

  const ComplexMatrix& matrix() const noexcept { return u_; }
  CVector target() const { return u_.column(0); }

 private:
  explicit PreparationUnitary(ComplexMatrix u) : u_(std::move(u)) {}
  ComplexMatrix u_;
};

StateVector init_basis(RegisterLayout layout, std::size_t index);

// Requires every system block to be supported on |0>; applies Gamma there.
StateVector prepare_system_state(StateVector state, const PreparationUnitary& gamma);
StateVector prepare_system_state(StateVector state, std::span<const cplx> v);

// Applies Gamma^dagger to the system register (undoes the preparation before
// amplitude readout).
StateVector unprepare_system_state(StateVector state, const PreparationUnitary& gamma);

// Uncontrolled U on the system register.
StateVector apply_system_unitary(StateVector state, const ComplexMatrix& u);

StateVector hadamard_deviation_register(StateVector state);

// sum_eps |eps><eps| (x) family[eps]. Members must be unitary to 1e-10 * N.
StateVector apply_controlled_family(StateVector state, std::span<const ComplexMatrix> family);

// (1/sqrt M) sum_jk exp(-2 pi i j k / M) |j><k| on the deviation register.
StateVector inverse_qft_deviation(StateVector state);

std::vector<double> deviation_distribution(const StateVector& state);

// Multinomial histogram, reproducible per seed.
std::vector<std::uint64_t> sample_distribution(std::span<const double> p, std::uint64_t rng_seed, std::uint64_t shots);
std::vector<std::uint64_t> sample_deviation(const StateVector& state, std::uint64_t rng_seed, std::uint64_t shots);

// {"m":, "n":, "re": [...], "im": [...]}
nlohmann::ordered_json to_json(const StateVector& state);

}  // namespace qgld::sv
