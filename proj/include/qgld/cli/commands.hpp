#pragma once

// Subcommand bodies behind the qgld executable. Each writes its CSV or JSON
// to `out` and returns a process exit code; run_guarded maps exceptions onto
// exit codes and a one-line message on `err`.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qgld/gpe/qgpe.hpp"
#include "qgld/linalg/matrix.hpp"

namespace qgld::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

enum class Format { csv, json };

// PATH to a matrix JSON file, or one of sigma-x, sigma-z, hadamard,
// identity[:N], diag:a,b,..., random-spd:N, random-hermitian:N. Random
// presets draw from `seed`.
ComplexMatrix load_matrix(const std::string& spec, std::uint64_t seed);

// PATH to a vector JSON file, or one of plus, minus, uniform, basis:i
// (1-based), random. Result is normalized only for presets; files must
// already be normalized.
CVector load_phi(const std::string& spec, std::size_t n, std::uint64_t seed);

// element:i,j (1-based), proj:i (1-based |i-1><i-1|), all-ones, identity,
// outer (needs phi).
gpe::PerturbationDirection parse_delta(const std::string& spec, std::size_t n, const CVector* phi);

struct EncodingFlags {
  double L = 1e-6;
  std::optional<double> W;  // unset selects the module's suggestion
  unsigned m = 1;
  std::string shift = "unshifted";
  bool prefactor_2pi = false;
};

gpe::GradientEncoding make_encoding(const EncodingFlags& flags, double default_w);

struct GradientConfig {
  std::string matrix;
  std::string delta = "element:1,2";
  std::string phi;                 // for --delta outer
  std::optional<std::size_t> p;    // 1-based, ascending eigenvalues; unset = all
  EncodingFlags enc;
  std::string readout = "signed";  // signed | amplitude | peak
  std::uint64_t seed = 1;
  std::uint64_t shots = 0;         // 0 = exact probabilities
};
int cmd_gradient(const GradientConfig& cfg, std::ostream& out);

int cmd_reproduce_table1(std::ostream& out);

struct QgldConfig {
  std::string matrix;
  std::string phi = "uniform";
  std::string mode = "per-eigenvector";  // per-eigenvector | sigma | sampled
  std::optional<std::size_t> k;
  std::string eigensource = "dense";     // dense | rqbl
  std::size_t b = 1;
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  std::size_t samples = 0;  // sampled mode; 0 = N
  bool pseudo_inverse = false;
  EncodingFlags enc;
  std::vector<double> sweep_l;  // non-empty: error-vs-L CSV
  Format format = Format::json;
};
int cmd_qgld(const QgldConfig& cfg, std::ostream& out);

struct LanczosConfig {
  std::string matrix;
  std::size_t b = 1;
  std::size_t k = 1;
  std::uint64_t seed = 1;
  Format format = Format::json;
};
int cmd_lanczos(const LanczosConfig& cfg, std::ostream& out);

struct KernelDemoConfig {
  std::size_t points = 16;
  std::size_t holdout = 50;
  double sigma = 1.0;
  double lambda = 1e-6;
  EncodingFlags enc;
  Format format = Format::csv;
};
int cmd_kernel_demo(const KernelDemoConfig& cfg, std::ostream& out);

int run_guarded(const std::function<int()>& body, std::ostream& err);

// %.9g
std::string fmt(double v);

}  // namespace qgld::cli
