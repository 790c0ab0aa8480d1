#include "qgld/gpe/qgpe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qgld/error.hpp"
#include "qgld/linalg/dense.hpp"
#include "qgld/sv/statevector.hpp"

namespace qgld::gpe {
namespace {

constexpr double kPhiNormTol = 1e-10;
constexpr double kProbTol = 1e-8;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_square(const ComplexMatrix& m, std::size_t n, const char* who) {
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(who) + ": expected " + std::to_string(n) + "x" +
                                                  std::to_string(n) + ", got " + std::to_string(m.rows()) + "x" +
                                                  std::to_string(m.cols()));
  }
}

}  // namespace

PerturbationDirection build_delta(const DeltaSpec& spec, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "build_delta: dimension 0");
  return std::visit(
      overloaded{
          [n](const delta::Element& e) {
            if (e.i >= n || e.j >= n) {
              throw Error(ErrorCode::IndexOutOfRange, "element (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                                          ") outside " + std::to_string(n) + "x" + std::to_string(n));
            }
            ComplexMatrix m(n, n);
            m(e.i, e.j) = 1.0;
            m(e.j, e.i) = 1.0;
            return PerturbationDirection{DeltaKind::element, std::move(m)};
          },
          [n](const delta::AllOnes&) {
            ComplexMatrix m(n, n);
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < n; ++j) m(i, j) = 1.0;
            return PerturbationDirection{DeltaKind::all_ones, std::move(m)};
          },
          [n](const delta::Outer& o) {
            if (o.phi.size() != n) {
              throw Error(ErrorCode::DimensionMismatch,
                          "phi has " + std::to_string(o.phi.size()) + " entries, matrix is " + std::to_string(n));
            }
            const double nrm = norm2(o.phi);
            if (std::abs(nrm - 1.0) > kPhiNormTol) {
              throw Error(ErrorCode::UnnormalizedPhi, "||phi|| = " + std::to_string(nrm));
            }
            return PerturbationDirection{DeltaKind::outer, outer_conj_first(o.phi)};
          },
          [n](const delta::Custom& c) {
            require_square(c.matrix, n, "custom delta");
            if (!c.matrix.is_hermitian()) {
              throw Error(ErrorCode::NonHermitianInput,
                          "custom delta defect " + std::to_string(c.matrix.hermiticity_defect()));
            }
            return PerturbationDirection{DeltaKind::custom, c.matrix};
          },
      },
      spec);
}

void GradientEncoding::validate() const {
  if (!(L > 0.0) || L > 1e-2) throw Error(ErrorCode::InvalidArgument, "L must lie in (0, 1e-2], got " + std::to_string(L));
  if (!(W > 0.0) || !std::isfinite(W)) throw Error(ErrorCode::InvalidArgument, "W must be positive, got " + std::to_string(W));
  if (m < 1 || m > 12) throw Error(ErrorCode::InvalidArgument, "m must lie in [1, 12], got " + std::to_string(m));
}

double GradientEncoding::deviation(std::size_t eps) const noexcept {
  const double mm = static_cast<double>(deviations());
  const double e = static_cast<double>(eps);
  return shift == Shift::centered ? (L / mm) * (e - mm / 2.0) : L * e / mm;
}

double GradientEncoding::time() const noexcept {
  const double t = static_cast<double>(deviations()) / (W * L);
  return prefactor_2pi ? 2.0 * std::numbers::pi * t : t;
}

double GradientEncoding::phase_per_gradient() const noexcept {
  return prefactor_2pi ? 2.0 * std::numbers::pi / W : 1.0 / W;
}

double suggest_gradient_scale(const ComplexMatrix& delta) {
  if (!delta.square() || delta.empty()) throw Error(ErrorCode::DimensionMismatch, "delta must be square");
  const auto eig = linalg::eig_hermitian(delta);
  double spec = 0.0;
  for (double v : eig.values) spec = std::max(spec, std::abs(v));
  return spec > 0.0 ? spec : 1.0;
}

std::vector<ComplexMatrix> evolution_family(const ComplexMatrix& x, const ComplexMatrix& delta,
                                            const GradientEncoding& enc) {
  enc.validate();
  if (!x.square()) throw Error(ErrorCode::DimensionMismatch, "X must be square");
  require_square(delta, x.rows(), "delta");
  if (!x.is_hermitian()) throw Error(ErrorCode::NonHermitianInput, "X defect " + std::to_string(x.hermiticity_defect()));

  const double t = enc.time();
  std::vector<ComplexMatrix> family;
  family.reserve(enc.deviations());
  for (std::size_t e = 0; e < enc.deviations(); ++e) {
    const double s = enc.deviation(e);
    family.push_back(s == 0.0 ? linalg::unitary_phase_exp(x, t) : linalg::unitary_phase_exp(x + delta * cplx{s}, t));
  }
  return family;
}

double phase_from_amplitudes(std::span<const cplx> c) {
  const std::size_t mdev = c.size();
  if (mdev < 2) throw Error(ErrorCode::InvalidArgument, "need at least two amplitudes");
  cplx a0{}, a1{};
  for (std::size_t j = 0; j < mdev; ++j) {
    a0 += c[j];
    a1 += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(mdev)) * c[j];
  }
  if (std::abs(a0) == 0.0) throw Error(ErrorCode::FlatDistribution, "no amplitude on the prepared state");
  return std::arg(a1 / a0);
}

QgpeOutcome qgpe_run(const ComplexMatrix& x, std::span<const cplx> p_state, const ComplexMatrix& delta,
                     const GradientEncoding& enc) {
  enc.validate();
  const std::size_t n = x.rows();
  if (p_state.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "state has " + std::to_string(p_state.size()) + " entries, X is " + std::to_string(n));
  }
  const auto family = evolution_family(x, delta, enc);
  const auto layout = sv::RegisterLayout::make(enc.m, sv::RegisterLayout::qubits_for(n));
  const auto gamma = sv::PreparationUnitary::from_target(p_state);

  auto state = sv::prepare_system_state(sv::init_basis(layout, 0), gamma);
  state = sv::hadamard_deviation_register(std::move(state));
  state = sv::apply_controlled_family(std::move(state), family);
  state = sv::inverse_qft_deviation(std::move(state));

  QgpeOutcome out;
  out.distribution = sv::deviation_distribution(state);
  const auto it = std::max_element(out.distribution.begin(), out.distribution.end());
  out.peak_index = static_cast<std::size_t>(it - out.distribution.begin());
  out.peak_gradient = [&] {
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(out.peak_index);
    const auto mdev = static_cast<std::ptrdiff_t>(enc.deviations());
    if (enc.shift == Shift::centered && 2 * j > mdev) j -= mdev;
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(mdev) / enc.phase_per_gradient();
  }();

  if (enc.m == 1) {
    const double p0 = std::clamp(out.distribution[0], 0.0, 1.0);
    out.amplitude_gradient = 2.0 * std::acos(std::sqrt(p0)) / enc.phase_per_gradient();
  }

  state = sv::unprepare_system_state(std::move(state), gamma);
  CVector c(enc.deviations());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = state.amplitude(j, 0);
  out.signed_gradient = phase_from_amplitudes(c) / enc.phase_per_gradient();

  const CVector xp = x * p_state;
  const cplx rq = dotc(p_state, xp);
  CVector r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = xp[i] - rq * p_state[i];
  out.eigenresidual = norm2(r);
  return out;
}

double extract_gradient_m1(double p0, double p1, double w) {
  if (!(p0 >= -kProbTol && p1 >= -kProbTol && p0 <= 1.0 + kProbTol && p1 <= 1.0 + kProbTol) ||
      std::abs(p0 + p1 - 1.0) > kProbTol) {
    throw Error(ErrorCode::ProbabilityOutOfRange,
                "p0=" + std::to_string(p0) + " p1=" + std::to_string(p1) + " do not form a distribution");
  }
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "W must be positive");
  return 2.0 * std::acos(std::sqrt(std::clamp(p0, 0.0, 1.0))) * w;
}

double extract_gradient_peak(std::span<const double> distribution, const GradientEncoding& enc) {
  enc.validate();
  if (distribution.size() != enc.deviations()) {
    throw Error(ErrorCode::DimensionMismatch, "distribution has " + std::to_string(distribution.size()) +
                                                  " bins, encoding expects " + std::to_string(enc.deviations()));
  }
  const auto it = std::max_element(distribution.begin(), distribution.end());
  const auto mdev = static_cast<std::ptrdiff_t>(distribution.size());
  if (*it < 2.0 / static_cast<double>(mdev)) {
    throw Error(ErrorCode::FlatDistribution, "peak probability " + std::to_string(*it) + " below 2/M");
  }
  std::ptrdiff_t j = it - distribution.begin();
  if (enc.shift == Shift::centered && 2 * j > mdev) j -= mdev;
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(mdev) / enc.phase_per_gradient();
}

}  // namespace qgld::gpe
