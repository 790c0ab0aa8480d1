#include "qgld/algo/kernel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "qgld/error.hpp"
#include "qgld/linalg/dense.hpp"

namespace qgld::algo {
namespace {

constexpr double kMaxCondition = 1e12;

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
  return d;
}

void validate(std::span<const Point> points, std::span<const double> targets, double sigma, double lambda) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no training points");
  if (points.size() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(points.size()) + " points, " +
                                                  std::to_string(targets.size()) + " targets");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  const std::size_t dim = points.front().size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) throw Error(ErrorCode::DimensionMismatch, "point " + std::to_string(i) + " dimension");
    for (std::size_t j = 0; j < i; ++j) {
      if (squared_distance(points[i], points[j]) == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "points " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
    }
  }
}

// Block-diagonal padding with the identity up to a power of two. The padded
// coordinates never meet the quadratic forms, whose vectors are zero there.
ComplexMatrix pad_to_power_of_two(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t padded = std::max<std::size_t>(2, std::bit_ceil(n));
  if (padded == n) return a;
  ComplexMatrix out = ComplexMatrix::identity(padded);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = a(i, j);
  return out;
}

}  // namespace

double gaussian_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "kernel arguments differ in dimension");
  return std::exp(-squared_distance(x, y) / (sigma * sigma));
}

ComplexMatrix regularized_kernel(std::span<const Point> points, double sigma, double lambda) {
  const std::size_t n = points.size();
  ComplexMatrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = 1.0 + lambda;
    for (std::size_t j = 0; j < i; ++j) {
      const double v = gaussian_kernel(points[i], points[j], sigma);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

KernelModel kernel_fit(std::span<const Point> points, std::span<const double> targets, double sigma, double lambda,
                       const std::optional<QgldSolver>& qgld) {
  validate(points, targets, sigma, lambda);
  const std::size_t n = points.size();
  const ComplexMatrix a = regularized_kernel(points, sigma, lambda);

  KernelModel model;
  model.points.assign(points.begin(), points.end());
  model.targets.assign(targets.begin(), targets.end());
  model.sigma = sigma;
  model.lambda = lambda;

  const auto spectrum = linalg::eig_hermitian(a).values;
  model.condition = spectrum.back() / spectrum.front();
  if (!(spectrum.front() > 0.0) || model.condition > kMaxCondition) {
    throw Error(ErrorCode::IllConditioned, "condition estimate " + std::to_string(model.condition));
  }

  if (!qgld) {
    model.solver = "classical";
    const ComplexMatrix y = linalg::inverse(a);
    model.alpha.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) model.alpha[i] += y(i, j).real() * targets[j];
    return model;
  }

  model.solver = "qgld";
  const ComplexMatrix x = pad_to_power_of_two(a);
  const std::size_t np = x.rows();
  double fnorm = 0.0;
  for (double f : targets) fnorm += f * f;
  fnorm = std::sqrt(fnorm);
  model.alpha.assign(n, 0.0);
  if (fnorm == 0.0) return model;

  const double w = qgld->polarization_weight;
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "polarization weight must be positive");
  InverseExpectationRequest req;
  req.x = x;
  req.k = qgld->k == 0 ? np : qgld->k;
  req.enc = qgld->enc;
  req.source = qgld->source;
  req.with_reference = false;

  // Q(z) = ||z||^2 Q(z / ||z||), each normalized form through QGLD.
  auto form = [&](const CVector& z) {
    const double nz = norm2(z);
    req.phi.resize(np);
    for (std::size_t r = 0; r < np; ++r) req.phi[r] = z[r] / nz;
    return nz * nz * qgld_expectation(req).total;
  };

  const cplx unit_i{0.0, 1.0};
  const std::array<cplx, 4> shifts{cplx{1.0}, unit_i, cplx{-1.0}, -unit_i};
  for (std::size_t i = 0; i < n; ++i) {
    // u^dagger Y v = 1/4 sum_k i^-k Q(u + i^k v), u = w e_i, v = f_hat.
    cplx uyv{};
    for (const cplx ik : shifts) {
      CVector z(np);
      for (std::size_t r = 0; r < n; ++r) z[r] = ik * targets[r] / fnorm;
      z[i] += w;
      uyv += std::conj(ik) * form(z);
    }
    uyv *= 0.25;
    model.polarization_imag = std::max(model.polarization_imag, std::abs(uyv.imag()));
    model.alpha[i] = fnorm * uyv.real() / w;
  }
  return model;
}

double kernel_predict(const KernelModel& model, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < model.points.size(); ++j) s += model.alpha[j] * gaussian_kernel(x, model.points[j], model.sigma);
  return s;
}

nlohmann::ordered_json to_json(const KernelModel& model) {
  nlohmann::ordered_json j;
  j["solver"] = model.solver;
  j["sigma"] = model.sigma;
  j["lambda"] = model.lambda;
  j["condition"] = model.condition;
  j["points"] = model.points;
  j["targets"] = model.targets;
  j["alpha"] = model.alpha;
  if (model.solver == "qgld") j["polarization_imag"] = model.polarization_imag;
  return j;
}

}  // namespace qgld::algo
