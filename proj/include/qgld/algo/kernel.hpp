#pragma once

// Gaussian-kernel ridge regression with weights alpha = (K + lambda I)^-1 f,
// solved either by LU or entry by entry through quadratic forms of the
// inverse.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgld/algo/qgld.hpp"
#include "qgld/linalg/matrix.hpp"

namespace qgld::algo {

using Point = std::vector<double>;

struct QgldSolver {
  std::size_t k = 0;  // 0 selects the full rank
  gpe::GradientEncoding enc;
  Eigensource source = DenseEigensource{};
  // Weight on e_i in the polarization vectors w e_i +- f_hat. Keeps every
  // quadratic form close to f_hat^dagger Y f_hat.
  double polarization_weight = 0.1;
};

struct KernelModel {
  std::vector<Point> points;
  std::vector<double> targets;
  double sigma = 1.0;
  double lambda = 0.0;
  std::vector<double> alpha;
  std::string solver;  // "classical" or "qgld"
  double condition = 0.0;
  // Largest |Im(u^dagger Y v)| seen during polarization (qgld only).
  double polarization_imag = 0.0;
};

// exp(-||x - y||^2 / sigma^2)
double gaussian_kernel(std::span<const double> x, std::span<const double> y, double sigma);

// K + lambda I
ComplexMatrix regularized_kernel(std::span<const Point> points, double sigma, double lambda);

// Errors: DimensionMismatch (shapes), InvalidArgument (lambda <= 0,
// sigma <= 0, repeated point), IllConditioned when cond(K + lambda I) > 1e12.
KernelModel kernel_fit(std::span<const Point> points, std::span<const double> targets, double sigma, double lambda,
                       const std::optional<QgldSolver>& qgld = std::nullopt);

double kernel_predict(const KernelModel& model, std::span<const double> x);

nlohmann::ordered_json to_json(const KernelModel& model);

}  // namespace qgld::algo
