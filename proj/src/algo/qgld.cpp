#include "qgld/algo/qgld.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qgld/error.hpp"
#include "qgld/lanczos/rqbl.hpp"
#include "qgld/linalg/dense.hpp"
#include "qgld/sv/statevector.hpp"
#include "qgld/util/parallel.hpp"
#include "qgld/util/rng.hpp"

namespace qgld::algo {
namespace {

constexpr double kNearZeroRel = 1e-10;
constexpr double kDegenerateRel = 1e-8;
constexpr double kPhiNormTol = 1e-10;

void require_hermitian_square(const ComplexMatrix& x) {
  if (!x.square() || x.empty()) throw Error(ErrorCode::DimensionMismatch, "X must be square");
  if (!x.is_hermitian()) throw Error(ErrorCode::NonHermitianInput, "X defect " + std::to_string(x.hermiticity_defect()));
}

void require_phi(const ComplexMatrix& x, std::span<const cplx> phi) {
  if (phi.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "phi has " + std::to_string(phi.size()) + " entries, X is " + std::to_string(x.rows()));
  }
  const double nrm = norm2(phi);
  if (std::abs(nrm - 1.0) > kPhiNormTol) throw Error(ErrorCode::UnnormalizedPhi, "||phi|| = " + std::to_string(nrm));
}

// Delta = Phi Phi^dagger, so that tr(Y Delta) = Phi^dagger Y Phi.
ComplexMatrix projector(std::span<const cplx> phi) {
  CVector conj_phi(phi.size());
  std::transform(phi.begin(), phi.end(), conj_phi.begin(), [](cplx z) { return std::conj(z); });
  return gpe::build_delta(gpe::delta::Outer{std::move(conj_phi)}, phi.size()).matrix;
}

// Largest-magnitude component real and positive; ties go to the lowest row.
void fix_phase_by_largest(ComplexMatrix& v, std::size_t col) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < v.rows(); ++r)
    if (std::abs(v(r, col)) > std::abs(v(best, col)) + 1e-12) best = r;
  const double mag = std::abs(v(best, col));
  if (mag == 0.0) return;
  const cplx ph = std::conj(v(best, col)) / mag;
  for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) *= ph;
  v(best, col) = mag;
}

bool more_relevant(double a, double b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
  return a > b;
}

Eigenpairs order_by_relevance(linalg::EigenDecomposition eig, const ComplexMatrix& x, const ComplexMatrix& delta) {
  linalg::adapt_degenerate_basis(eig, delta, kDegenerateRel * x.frobenius_norm());
  std::vector<std::size_t> order(eig.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return more_relevant(eig.values[l], eig.values[r]); });
  Eigenpairs out;
  out.vectors = ComplexMatrix(x.rows(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const CVector v = eig.vector(order[i]);
    const double e = eig.values[order[i]];
    CVector r = x * v;
    for (std::size_t t = 0; t < r.size(); ++t) r[t] -= e * v[t];
    out.values.push_back(e);
    out.residuals.push_back(norm2(r));
    out.vectors.set_column(i, v);
  }
  return out;
}

std::string shift_name(gpe::Shift s) { return s == gpe::Shift::centered ? "centered" : "unshifted"; }

// z_eps amplitudes of the prepared state through the deviation register,
// returning the readout phase arg(z_1 / z_0).
double superposition_phase(std::span<const cplx> start, std::span<const ComplexMatrix> family,
                           const ComplexMatrix& inverse_evolution, const gpe::GradientEncoding& enc) {
  const auto layout = sv::RegisterLayout::make(enc.m, sv::RegisterLayout::qubits_for(start.size()));
  const auto gamma = sv::PreparationUnitary::from_target(start);
  auto state = sv::prepare_system_state(sv::init_basis(layout, 0), gamma);
  state = sv::hadamard_deviation_register(std::move(state));
  state = sv::apply_controlled_family(std::move(state), family);
  state = sv::apply_system_unitary(std::move(state), inverse_evolution);
  state = sv::inverse_qft_deviation(std::move(state));
  state = sv::unprepare_system_state(std::move(state), gamma);
  CVector c(layout.deviation_size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = state.amplitude(j, 0);
  return gpe::phase_from_amplitudes(c);
}

struct SigmaSetup {
  Eigenpairs pairs;
  std::vector<ComplexMatrix> family;
  ComplexMatrix inverse_evolution;
  double cancellation_residual = 0.0;
};

SigmaSetup sigma_setup(const ComplexMatrix& x, std::span<const cplx> phi, const gpe::GradientEncoding& enc) {
  enc.validate();
  require_hermitian_square(x);
  require_phi(x, phi);
  const std::size_t n = x.rows();
  const ComplexMatrix delta = projector(phi);

  SigmaSetup s;
  s.pairs = order_by_relevance(linalg::eig_hermitian(x), x, delta);
  const double floor = kNearZeroRel * x.frobenius_norm();
  std::vector<double> kick(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double e = s.pairs.values[p];
    if (std::abs(e) <= floor) {
      throw Error(ErrorCode::NearZeroEigenvalue, "|E_" + std::to_string(p) + "| = " + std::to_string(std::abs(e)));
    }
    fix_phase_by_largest(s.pairs.vectors, p);
    kick[p] = quadratic_form(delta, s.pairs.vector(p)).real() / e;
  }

  // Bare eigenphases and kicks are kept as separate factors so that the
  // inverse evolution cancels the former to rounding.
  const double t = enc.time();
  std::vector<cplx> bare(n);
  for (std::size_t p = 0; p < n; ++p) bare[p] = std::polar(1.0, t * s.pairs.values[p]);

  auto spectral = [&](auto&& phase_of) {
    ComplexMatrix m(n, n);
    for (std::size_t p = 0; p < n; ++p) {
      const cplx ph = phase_of(p);
      for (std::size_t i = 0; i < n; ++i) {
        const cplx vi = s.pairs.vectors(i, p) * ph;
        for (std::size_t j = 0; j < n; ++j) m(i, j) += vi * std::conj(s.pairs.vectors(j, p));
      }
    }
    return m;
  };

  s.family.reserve(enc.deviations());
  for (std::size_t e = 0; e < enc.deviations(); ++e) {
    const double se = enc.deviation(e);
    s.family.push_back(spectral([&](std::size_t p) { return bare[p] * std::polar(1.0, t * se * kick[p]); }));
  }
  s.inverse_evolution = spectral([&](std::size_t p) { return std::conj(bare[p]); });

  const ComplexMatrix rest = s.inverse_evolution * s.family[0];
  const double s0 = enc.deviation(0);
  for (std::size_t p = 0; p < n; ++p) {
    const cplx d = quadratic_form(rest, s.pairs.vector(p)) * std::polar(1.0, -t * s0 * kick[p]);
    s.cancellation_residual = std::max(s.cancellation_residual, std::abs(std::arg(d)));
  }
  return s;
}

}  // namespace

Eigenpairs relevant_eigenpairs(const ComplexMatrix& x, const ComplexMatrix& delta, const Eigensource& source) {
  require_hermitian_square(x);
  if (const auto* rq = std::get_if<RqblEigensource>(&source)) {
    const std::size_t b = rq->b;
    if (b < 1 || b > x.rows()) throw Error(ErrorCode::InvalidArgument, "block size " + std::to_string(b));
    const std::size_t steps = rq->steps == 0 ? x.rows() / b : rq->steps;
    const auto ritz = lanczos::run_rqbl(x, b, steps, rq->seed);
    // Back to ascending order for the cluster rotation.
    std::vector<std::size_t> asc(ritz.size());
    std::iota(asc.begin(), asc.end(), std::size_t{0});
    std::stable_sort(asc.begin(), asc.end(), [&](std::size_t l, std::size_t r) { return ritz.values[l] < ritz.values[r]; });
    linalg::EigenDecomposition eig;
    eig.vectors = ComplexMatrix(x.rows(), asc.size());
    for (std::size_t i = 0; i < asc.size(); ++i) {
      eig.values.push_back(ritz.values[asc[i]]);
      eig.vectors.set_column(i, ritz.vector(asc[i]));
    }
    return order_by_relevance(std::move(eig), x, delta);
  }
  return order_by_relevance(linalg::eig_hermitian(x), x, delta);
}

InverseExpectationReport qgld_contributions(const ComplexMatrix& x, const ComplexMatrix& delta, std::size_t k,
                                            const gpe::GradientEncoding& enc, const Eigensource& source,
                                            bool pseudo_inverse) {
  enc.validate();
  require_hermitian_square(x);
  const Eigenpairs pairs = relevant_eigenpairs(x, delta, source);
  if (k < 1 || k > pairs.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(pairs.size()) + "]");
  }

  InverseExpectationReport rep;
  rep.enc = enc;
  rep.source = source;
  rep.contributions.resize(k);
  const double floor = kNearZeroRel * x.frobenius_norm();
  for (std::size_t p = 0; p < k; ++p) {
    auto& c = rep.contributions[p];
    c.p = p;
    c.energy = pairs.values[p];
    c.eigensolver_residual = pairs.residuals[p];
    if (std::abs(c.energy) <= floor) {
      if (!pseudo_inverse) {
        throw Error(ErrorCode::NearZeroEigenvalue,
                    "|E_" + std::to_string(p) + "| = " + std::to_string(std::abs(c.energy)) + " at or below threshold");
      }
      c.skipped = true;
    }
  }

  parallel_for(k, [&](std::size_t p) {
    auto& c = rep.contributions[p];
    if (c.skipped) return;
    const auto out = gpe::qgpe_run(x, pairs.vector(p), delta, enc);
    c.delta_energy = out.signed_gradient;
    c.delta_energy_magnitude = out.amplitude_gradient;
    c.eigenresidual = out.eigenresidual;
    c.yp = c.delta_energy / c.energy;
  });

  // Relevance order: largest |E_p| first, smallest weight 1/|E_p| first.
  for (const auto& c : rep.contributions) rep.total += c.yp;
  return rep;
}

double logdet_gradient_entry(const ComplexMatrix& x, std::size_t i, std::size_t j, std::size_t k,
                             const gpe::GradientEncoding& enc, const Eigensource& source, bool pseudo_inverse) {
  if (!x.square()) throw Error(ErrorCode::DimensionMismatch, "X must be square");
  const auto delta = gpe::build_delta(gpe::delta::Element{i, j}, x.rows());
  return qgld_contributions(x, delta.matrix, k, enc, source, pseudo_inverse).total;
}

InverseExpectationReport qgld_expectation(const InverseExpectationRequest& request) {
  require_hermitian_square(request.x);
  require_phi(request.x, request.phi);
  auto rep = qgld_contributions(request.x, projector(request.phi), request.k, request.enc, request.source,
                                request.pseudo_inverse);
  if (request.with_reference) rep.classical_reference = classical_reference_expectation(request.x, request.phi);
  return rep;
}

double classical_reference_expectation(const ComplexMatrix& x, std::span<const cplx> phi) {
  require_hermitian_square(x);
  if (phi.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "phi length");
  const cplx v = quadratic_form(linalg::inverse(x), phi);
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw Error(ErrorCode::NonHermitianInput, "quadratic form has imaginary part " + std::to_string(v.imag()));
  }
  return v.real();
}

double sigma_gradient_scale(const ComplexMatrix& x, std::span<const cplx> phi) {
  require_hermitian_square(x);
  require_phi(x, phi);
  const auto eig = linalg::eig_hermitian(x);
  double smallest = std::numeric_limits<double>::infinity();
  for (double e : eig.values) smallest = std::min(smallest, std::abs(e));
  if (smallest <= kNearZeroRel * x.frobenius_norm()) {
    throw Error(ErrorCode::NearZeroEigenvalue, "smallest |E| = " + std::to_string(smallest));
  }
  // |dE_p| <= ||Phi Phi^dagger|| = 1.
  return 1e4 / smallest;
}

SigmaReport sigma_qgld_expectation(const ComplexMatrix& x, std::span<const cplx> phi, const gpe::GradientEncoding& enc) {
  const SigmaSetup s = sigma_setup(x, phi, enc);
  const std::size_t n = x.rows();
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  CVector start(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i) start[i] += amp * s.pairs.vectors(i, p);

  SigmaReport rep;
  rep.w = enc.W;
  rep.cancellation_residual = s.cancellation_residual;
  rep.readout_phase = superposition_phase(start, s.family, s.inverse_evolution, enc);
  rep.total = static_cast<double>(n) * rep.readout_phase / enc.phase_per_gradient();
  return rep;
}

SampledEstimate sampled_qgld(const ComplexMatrix& x, std::span<const cplx> phi, std::size_t n_samples,
                             std::uint64_t rng_seed, const gpe::GradientEncoding& enc) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const SigmaSetup s = sigma_setup(x, phi, enc);
  const std::size_t n = x.rows();

  std::vector<CVector> starts;
  starts.reserve(n_samples);
  Xoshiro256 rng(rng_seed);
  while (starts.size() < n_samples) {
    const ComplexMatrix batch = linalg::orthonormalize_svd(gaussian_matrix(n, n, rng)).matrix();
    for (std::size_t c = 0; c < n && starts.size() < n_samples; ++c) starts.push_back(batch.column(c));
  }

  SampledEstimate out;
  out.samples.resize(n_samples);
  parallel_for(n_samples, [&](std::size_t r) {
    out.samples[r] = static_cast<double>(n) * superposition_phase(starts[r], s.family, s.inverse_evolution, enc) /
                     enc.phase_per_gradient();
  });
  double sum = 0.0;
  for (double v : out.samples) sum += v;
  out.estimate = sum / static_cast<double>(n_samples);
  if (n_samples > 1) {
    double ss = 0.0;
    for (double v : out.samples) ss += (v - out.estimate) * (v - out.estimate);
    out.spread = std::sqrt(ss / static_cast<double>(n_samples - 1));
  }
  return out;
}

nlohmann::ordered_json to_json(const gpe::GradientEncoding& enc) {
  nlohmann::ordered_json j;
  j["L"] = enc.L;
  j["W"] = enc.W;
  j["m"] = enc.m;
  j["shift"] = shift_name(enc.shift);
  j["prefactor_2pi"] = enc.prefactor_2pi;
  return j;
}

nlohmann::ordered_json to_json(const InverseExpectationReport& report) {
  nlohmann::ordered_json j;
  auto contrib = nlohmann::ordered_json::array();
  for (const auto& c : report.contributions) {
    nlohmann::ordered_json e;
    e["p"] = c.p;
    e["E_p"] = c.energy;
    e["deltaE_p"] = c.delta_energy;
    if (c.delta_energy_magnitude) e["deltaE_p_magnitude"] = *c.delta_energy_magnitude;
    e["Yp"] = c.yp;
    e["eigenresidual"] = c.eigenresidual;
    e["eigensolver_residual"] = c.eigensolver_residual;
    e["skipped"] = c.skipped;
    contrib.push_back(std::move(e));
  }
  j["contributions"] = std::move(contrib);
  j["total"] = report.total;
  j["classical_reference"] = report.classical_reference ? nlohmann::ordered_json(*report.classical_reference)
                                                        : nlohmann::ordered_json(nullptr);
  j["encoding"] = to_json(report.enc);
  nlohmann::ordered_json src;
  if (const auto* rq = std::get_if<RqblEigensource>(&report.source)) {
    src["kind"] = "rqbl";
    src["b"] = rq->b;
    src["steps"] = rq->steps;
    src["seed"] = rq->seed;
  } else {
    src["kind"] = "dense";
  }
  j["eigensource"] = std::move(src);
  return j;
}

}  // namespace qgld::algo
