#include "qgld/sv/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qgld/error.hpp"
#include "qgld/simd/kernels.hpp"
#include "qgld/util/parallel.hpp"
#include "qgld/util/rng.hpp"

namespace qgld::sv {
namespace {

constexpr double kNormTol = 1e-10;
constexpr double kUnitaryTol = 1e-10;
// Below this many amplitudes the family loop stays on the calling thread.
constexpr std::size_t kParallelThreshold = std::size_t{1} << 16;

void require_system_dim(const StateVector& s, const ComplexMatrix& u, const char* who) {
  if (u.rows() != s.layout().system_size() || u.cols() != s.layout().system_size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(who) + ": operator is " + std::to_string(u.rows()) + "x" +
                                                  std::to_string(u.cols()) + ", system register holds " +
                                                  std::to_string(s.layout().system_size()));
  }
}

void apply_to_blocks(StateVector& state, const ComplexMatrix& u) {
  const std::size_t nsys = state.layout().system_size();
  CVector tmp(nsys);
  for (std::size_t e = 0; e < state.layout().deviation_size(); ++e) {
    auto blk = state.block(e);
    simd::gemv(u.data(), blk.data(), tmp.data(), nsys, nsys);
    std::copy(tmp.begin(), tmp.end(), blk.begin());
  }
}

double unitarity_defect(const ComplexMatrix& u) {
  return (adjoint_times(u, u) - ComplexMatrix::identity(u.rows())).frobenius_norm();
}

}  // namespace

RegisterLayout RegisterLayout::make(unsigned m, unsigned n) {
  if (m < 1 || n < 1 || m + n > kMaxQubits) {
    throw Error(ErrorCode::InvalidArgument, "register layout m=" + std::to_string(m) + " n=" + std::to_string(n) +
                                                " outside 1 <= m, 1 <= n, m + n <= 26");
  }
  return RegisterLayout{m, n};
}

unsigned RegisterLayout::qubits_for(std::size_t dim) {
  if (dim < 2 || !std::has_single_bit(dim)) {
    throw Error(ErrorCode::InvalidArgument, "system dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  return static_cast<unsigned>(std::countr_zero(dim));
}

StateVector::StateVector(RegisterLayout layout, CVector amplitudes) : layout_(layout), amps_(std::move(amplitudes)) {
  if (amps_.size() != layout_.size()) throw Error(ErrorCode::DimensionMismatch, "amplitude count");
  if (std::abs(norm() - 1.0) > kNormTol) throw Error(ErrorCode::UnnormalizedTarget, "state norm " + std::to_string(norm()));
}

double StateVector::norm() const noexcept { return std::sqrt(simd::norm_sq(amps_.data(), amps_.size())); }

PreparationUnitary PreparationUnitary::from_target(std::span<const cplx> v) {
  const std::size_t n = v.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty target");
  const double nv = norm2(v);
  if (std::abs(nv - 1.0) > kNormTol) throw Error(ErrorCode::UnnormalizedTarget, "target norm " + std::to_string(nv));

  const double mag0 = std::abs(v[0]);
  const cplx phase = mag0 > 0.0 ? v[0] / mag0 : cplx{1.0, 0.0};
  // Reflect x = phase * e0 onto v; x^dagger v = |v0| is real so the
  // Householder map sends x exactly to v.
  CVector u(v.begin(), v.end());
  u[0] -= phase;
  const double un2 = std::pow(norm2(u), 2);
  ComplexMatrix gamma = ComplexMatrix::identity(n);
  if (un2 > 1e-28) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gamma(i, j) -= 2.0 * u[i] * std::conj(u[j]) / un2;
  }
  gamma *= phase;
  return PreparationUnitary(std::move(gamma));
}

StateVector init_basis(RegisterLayout layout, std::size_t index) {
  if (index >= layout.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(index) + " >= " + std::to_string(layout.size()));
  }
  CVector amps(layout.size());
  amps[index] = 1.0;
  return StateVector(layout, std::move(amps));
}

StateVector prepare_system_state(StateVector state, const PreparationUnitary& gamma) {
  require_system_dim(state, gamma.matrix(), "prepare_system_state");
  for (std::size_t e = 0; e < state.layout().deviation_size(); ++e) {
    const auto blk = state.block(e);
    for (std::size_t s = 1; s < blk.size(); ++s) {
      if (std::abs(blk[s]) > 1e-12) {
        throw Error(ErrorCode::NotInGroundRegister, "system register has weight on |" + std::to_string(s) + ">");
      }
    }
  }
  apply_to_blocks(state, gamma.matrix());
  return state;
}

StateVector prepare_system_state(StateVector state, std::span<const cplx> v) {
  return prepare_system_state(std::move(state), PreparationUnitary::from_target(v));
}

StateVector unprepare_system_state(StateVector state, const PreparationUnitary& gamma) {
  require_system_dim(state, gamma.matrix(), "unprepare_system_state");
  apply_to_blocks(state, gamma.matrix().adjoint());
  return state;
}

StateVector apply_system_unitary(StateVector state, const ComplexMatrix& u) {
  require_system_dim(state, u, "apply_system_unitary");
  if (unitarity_defect(u) > kUnitaryTol * static_cast<double>(u.rows())) {
    throw Error(ErrorCode::NonUnitaryMember, "system operator is not unitary");
  }
  apply_to_blocks(state, u);
  return state;
}

StateVector hadamard_deviation_register(StateVector state) {
  const std::size_t nsys = state.layout().system_size();
  const std::size_t mdev = state.layout().deviation_size();
  const double s = std::numbers::sqrt2 / 2.0;
  for (std::size_t bit = 1; bit < mdev; bit <<= 1) {
    for (std::size_t e = 0; e < mdev; ++e) {
      if (e & bit) continue;
      simd::butterfly(state.block(e).data(), state.block(e | bit).data(), 1.0, s, nsys);
    }
  }
  return state;
}

StateVector apply_controlled_family(StateVector state, std::span<const ComplexMatrix> family) {
  const std::size_t mdev = state.layout().deviation_size();
  const std::size_t nsys = state.layout().system_size();
  if (family.size() != mdev) {
    throw Error(ErrorCode::FamilySizeMismatch,
                "family has " + std::to_string(family.size()) + " members, register needs " + std::to_string(mdev));
  }
  for (std::size_t e = 0; e < mdev; ++e) {
    require_system_dim(state, family[e], "apply_controlled_family");
    const double defect = unitarity_defect(family[e]);
    if (defect > kUnitaryTol * static_cast<double>(nsys)) {
      throw Error(ErrorCode::NonUnitaryMember, "member " + std::to_string(e) + " defect " + std::to_string(defect));
    }
  }
  auto body = [&](std::size_t e) {
    CVector tmp(nsys);
    auto blk = state.block(e);
    simd::gemv(family[e].data(), blk.data(), tmp.data(), nsys, nsys);
    std::copy(tmp.begin(), tmp.end(), blk.begin());
  };
  // Blocks are disjoint, so the result does not depend on the worker count.
  parallel_for(mdev, body, state.layout().size() >= kParallelThreshold ? 0 : 1);
  return state;
}

StateVector inverse_qft_deviation(StateVector state) {
  const std::size_t mdev = state.layout().deviation_size();
  const std::size_t nsys = state.layout().system_size();
  const unsigned bits = state.layout().m;
  // Bit-reverse the deviation blocks, then radix-2 decimation in time with
  // kernel exp(-2 pi i jk / M). Each stage carries 1/sqrt(2).
  for (std::size_t e = 0; e < mdev; ++e) {
    std::size_t r = 0;
    for (unsigned b = 0; b < bits; ++b) r |= ((e >> b) & 1u) << (bits - 1 - b);
    if (r > e) std::swap_ranges(state.block(e).begin(), state.block(e).end(), state.block(r).begin());
  }
  const double s = std::numbers::sqrt2 / 2.0;
  for (std::size_t len = 2; len <= mdev; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const cplx w = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
      for (std::size_t start = 0; start < mdev; start += len) {
        simd::butterfly(state.block(start + k).data(), state.block(start + k + half).data(), w, s, nsys);
      }
    }
  }
  return state;
}

std::vector<double> deviation_distribution(const StateVector& state) {
  const std::size_t mdev = state.layout().deviation_size();
  std::vector<double> p(mdev);
  for (std::size_t e = 0; e < mdev; ++e) {
    const auto blk = state.block(e);
    p[e] = simd::norm_sq(blk.data(), blk.size());
  }
  return p;
}

std::vector<std::uint64_t> sample_distribution(std::span<const double> p, std::uint64_t rng_seed, std::uint64_t shots) {
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be >= 1");
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, "empty distribution");
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw Error(ErrorCode::ProbabilityOutOfRange, "negative probability at " + std::to_string(i));
    cdf[i] = (acc += p[i]);
  }
  Xoshiro256 rng(rng_seed);
  std::vector<std::uint64_t> hist(p.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    if (idx >= p.size()) idx = p.size() - 1;
    ++hist[idx];
  }
  return hist;
}

std::vector<std::uint64_t> sample_deviation(const StateVector& state, std::uint64_t rng_seed, std::uint64_t shots) {
  return sample_distribution(deviation_distribution(state), rng_seed, shots);
}

nlohmann::ordered_json to_json(const StateVector& state) {
  nlohmann::ordered_json j;
  j["m"] = state.layout().m;
  j["n"] = state.layout().n;
  auto re = nlohmann::ordered_json::array();
  auto im = nlohmann::ordered_json::array();
  for (const auto& a : state.amplitudes()) {
    re.push_back(a.real());
    im.push_back(a.imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

}  // namespace qgld::sv
