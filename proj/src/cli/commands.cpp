#include "qgld/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qgld/algo/kernel.hpp"
#include "qgld/algo/qgld.hpp"
#include "qgld/error.hpp"
#include "qgld/io/json_io.hpp"
#include "qgld/lanczos/rqbl.hpp"
#include "qgld/linalg/dense.hpp"
#include "qgld/sv/statevector.hpp"
#include "qgld/util/rng.hpp"

namespace qgld::cli {
namespace {

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t parse_index(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(ErrorCode::InvalidArgument, "bad " + what + ": '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad " + what + ": '" + s + "'");
  }
}

// 1-based on the command line, zero-based in the library.
std::size_t one_based(const std::string& s, std::size_t n, const std::string& what) {
  const std::size_t v = parse_index(s, what);
  if (v < 1 || v > n) {
    throw Error(ErrorCode::IndexOutOfRange, what + " " + s + " outside [1, " + std::to_string(n) + "]");
  }
  return v - 1;
}

ComplexMatrix random_spd(std::size_t n, Xoshiro256& rng) {
  const ComplexMatrix q = linalg::orthonormalize_svd(gaussian_matrix(n, n, rng)).matrix();
  std::vector<double> d(n);
  for (auto& v : d) v = 0.5 + 2.5 * rng.uniform();
  const ComplexMatrix x = q * ComplexMatrix::diagonal(std::span<const double>(d)) * q.adjoint();
  return (x + x.adjoint()) * cplx{0.5};
}

ComplexMatrix random_hermitian(std::size_t n, Xoshiro256& rng) {
  const ComplexMatrix g = gaussian_matrix(n, n, rng);
  return (g + g.adjoint()) * cplx{0.5};
}

void write_json(std::ostream& out, const io::json& j) { out << j.dump(2) << '\n'; }

linalg::EigenDecomposition adapted_eig(const ComplexMatrix& x, const ComplexMatrix& delta) {
  auto eig = linalg::eig_hermitian(x);
  linalg::adapt_degenerate_basis(eig, delta, 1e-8 * x.frobenius_norm());
  return eig;
}

struct Table1Row {
  const char* delta;
  const char* state;
  double reference;  // NaN when no reference value exists
};

}  // namespace

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

ComplexMatrix load_matrix(const std::string& spec, std::uint64_t seed) {
  const double r = std::numbers::sqrt2 / 2.0;
  if (spec == "sigma-x") return ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}};
  if (spec == "sigma-z") return ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}};
  if (spec == "hadamard") return ComplexMatrix{{r, r}, {r, -r}};
  if (spec == "identity") return ComplexMatrix::identity(2);
  if (starts_with(spec, "identity:")) return ComplexMatrix::identity(parse_index(spec.substr(9), "identity size"));
  if (starts_with(spec, "diag:")) {
    std::vector<double> d;
    for (const auto& t : split(spec.substr(5), ',')) d.push_back(parse_double(t, "diagonal entry"));
    if (d.empty()) throw Error(ErrorCode::InvalidArgument, "diag preset needs entries");
    return ComplexMatrix::diagonal(std::span<const double>(d));
  }
  if (starts_with(spec, "random-spd:") || starts_with(spec, "random-hermitian:")) {
    const bool spd = starts_with(spec, "random-spd:");
    const std::size_t n = parse_index(spec.substr(spec.find(':') + 1), "matrix size");
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "matrix size must be positive");
    Xoshiro256 rng(seed);
    return spd ? random_spd(n, rng) : random_hermitian(n, rng);
  }
  return io::read_matrix_file(spec);
}

CVector load_phi(const std::string& spec, std::size_t n, std::uint64_t seed) {
  CVector v;
  if (spec == "plus" || spec == "minus") {
    if (n != 2) throw Error(ErrorCode::DimensionMismatch, spec + " preset needs N = 2");
    v = {1.0, spec == "plus" ? 1.0 : -1.0};
  } else if (spec == "uniform") {
    v.assign(n, 1.0);
  } else if (starts_with(spec, "basis:")) {
    v.assign(n, 0.0);
    v[one_based(spec.substr(6), n, "basis index")] = 1.0;
  } else if (spec == "random") {
    Xoshiro256 rng(seed ^ 0x5eedf00dULL);
    v = gaussian_matrix(n, 1, rng).column(0);
  } else {
    v = io::read_vector_file(spec);
    if (v.size() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "phi has " + std::to_string(v.size()) + " entries, matrix is " + std::to_string(n));
    }
    return v;
  }
  const double nv = norm2(v);
  for (auto& z : v) z /= nv;
  return v;
}

gpe::PerturbationDirection parse_delta(const std::string& spec, std::size_t n, const CVector* phi) {
  if (starts_with(spec, "element:")) {
    const auto parts = split(spec.substr(8), ',');
    if (parts.size() != 2) throw Error(ErrorCode::InvalidArgument, "element needs i,j");
    return gpe::build_delta(gpe::delta::Element{one_based(parts[0], n, "row index"), one_based(parts[1], n, "column index")}, n);
  }
  if (starts_with(spec, "proj:")) {
    const std::size_t i = one_based(spec.substr(5), n, "projector index");
    gpe::PerturbationDirection d = gpe::build_delta(gpe::delta::Element{i, i}, n);
    d.kind = gpe::DeltaKind::custom;
    return d;
  }
  if (spec == "all-ones") return gpe::build_delta(gpe::delta::AllOnes{}, n);
  if (spec == "identity") return gpe::build_delta(gpe::delta::Custom{ComplexMatrix::identity(n)}, n);
  if (spec == "outer") {
    if (phi == nullptr) throw Error(ErrorCode::InvalidArgument, "--delta outer needs --phi");
    return gpe::build_delta(gpe::delta::Outer{*phi}, n);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown delta '" + spec + "'");
}

gpe::GradientEncoding make_encoding(const EncodingFlags& flags, double default_w) {
  gpe::GradientEncoding enc;
  enc.L = flags.L;
  enc.W = flags.W.value_or(default_w);
  enc.m = flags.m;
  if (flags.shift == "centered") {
    enc.shift = gpe::Shift::centered;
  } else if (flags.shift != "unshifted") {
    throw Error(ErrorCode::InvalidArgument, "shift must be unshifted or centered");
  }
  enc.prefactor_2pi = flags.prefactor_2pi;
  enc.validate();
  return enc;
}

int cmd_gradient(const GradientConfig& cfg, std::ostream& out) {
  const ComplexMatrix x = load_matrix(cfg.matrix, cfg.seed);
  if (!x.is_hermitian()) throw Error(ErrorCode::NonHermitianInput, "matrix is not hermitian");
  const std::size_t n = x.rows();
  std::optional<CVector> phi;
  if (!cfg.phi.empty()) phi = load_phi(cfg.phi, n, cfg.seed);
  const auto delta = parse_delta(cfg.delta, n, phi ? &*phi : nullptr);
  const auto enc = make_encoding(cfg.enc, gpe::suggest_gradient_scale(delta.matrix));
  if (cfg.readout != "signed" && cfg.readout != "amplitude" && cfg.readout != "peak") {
    throw Error(ErrorCode::InvalidArgument, "readout must be signed, amplitude or peak");
  }
  if (cfg.readout == "amplitude" && enc.m != 1) throw Error(ErrorCode::InvalidArgument, "amplitude readout needs m = 1");
  if (cfg.readout == "signed" && cfg.shots > 0) {
    throw Error(ErrorCode::InvalidArgument, "signed readout uses amplitudes; drop --shots or pick amplitude/peak");
  }

  const auto eig = adapted_eig(x, delta.matrix);
  std::vector<std::size_t> which;
  if (cfg.p) {
    if (*cfg.p < 1 || *cfg.p > n) {
      throw Error(ErrorCode::IndexOutOfRange, "eigenstate " + std::to_string(*cfg.p) + " outside [1, " + std::to_string(n) + "]");
    }
    which.push_back(*cfg.p - 1);
  } else {
    for (std::size_t p = 0; p < n; ++p) which.push_back(p);
  }

  out << "p,E_p,delta_kind,L,m,gradient_quantum,gradient_oracle,abs_error\n";
  for (const std::size_t p : which) {
    const CVector v = eig.vector(p);
    const auto res = gpe::qgpe_run(x, v, delta.matrix, enc);
    std::vector<double> dist = res.distribution;
    if (cfg.shots > 0) {
      const auto hist = sv::sample_distribution(dist, cfg.seed + p, cfg.shots);
      for (std::size_t j = 0; j < dist.size(); ++j) dist[j] = static_cast<double>(hist[j]) / static_cast<double>(cfg.shots);
    }
    const double oracle = quadratic_form(delta.matrix, v).real();
    double quantum = res.signed_gradient;
    double compare = oracle;
    if (cfg.readout == "amplitude") {
      quantum = gpe::extract_gradient_m1(dist[0], dist[1], 1.0) / enc.phase_per_gradient();
      compare = std::abs(oracle);
    } else if (cfg.readout == "peak") {
      quantum = gpe::extract_gradient_peak(dist, enc);
    }
    out << p + 1 << ',' << fmt(eig.values[p]) << ',' << cfg.delta << ',' << fmt(enc.L) << ',' << enc.m << ','
        << fmt(quantum) << ',' << fmt(oracle) << ',' << fmt(std::abs(quantum - compare)) << '\n';
  }
  return kExitOk;
}

int cmd_reproduce_table1(std::ostream& out) {
  const double r = std::numbers::sqrt2 / 2.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const ComplexMatrix sx{{0.0, 1.0}, {1.0, 0.0}};
  const ComplexMatrix had{{r, r}, {r, -r}};
  const CVector plus{r, r};
  const CVector minus{r, -r};
  const CVector hplus{std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8)};
  const CVector hminus{-std::sin(std::numbers::pi / 8), std::cos(std::numbers::pi / 8)};

  struct Case {
    Table1Row row;
    const ComplexMatrix* x;
    ComplexMatrix delta;
    const CVector* state;
  };
  const std::vector<Case> cases{
      {{"X", "+", 0.999999}, &sx, sx, &plus},
      {{"X", "-", 0.999999}, &sx, sx, &minus},
      {{"|0><0|", "+", 0.500000}, &sx, ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}, &plus},
      {{"|0><0|", "-", 0.499999}, &sx, ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}, &minus},
      {{"|1><1|", "+", 0.500000}, &sx, ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}, &plus},
      {{"|1><1|", "-", 0.499999}, &sx, ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}, &minus},
      {{"I", "+", 0.999999}, &sx, ComplexMatrix::identity(2), &plus},
      {{"I", "-", 1.000000}, &sx, ComplexMatrix::identity(2), &minus},
      {{"X", "H+", 0.70710691}, &had, sx, &hplus},
      {{"X", "H-", nan}, &had, sx, &hminus},
  };

  gpe::GradientEncoding enc;  // L = 1e-6, W = 1, m = 1
  out << "H0,delta,state,L,gradient_quantum,reference_value,abs_error,gradient_signed\n";
  for (const auto& c : cases) {
    const auto res = gpe::qgpe_run(*c.x, *c.state, c.delta, enc);
    const double q = *res.amplitude_gradient;
    const bool has_reference = !std::isnan(c.row.reference);
    out << (c.x == &sx ? "X" : "H") << ',' << c.row.delta << ',' << c.row.state << ',' << fmt(enc.L) << ',' << fmt(q)
        << ',' << (has_reference ? fmt(c.row.reference) : "") << ',' << (has_reference ? fmt(std::abs(q - c.row.reference)) : "")
        << ',' << fmt(res.signed_gradient) << '\n';
  }
  return kExitOk;
}

namespace {

algo::Eigensource make_source(const QgldConfig& cfg) {
  if (cfg.eigensource == "dense") return algo::DenseEigensource{};
  if (cfg.eigensource == "rqbl") return algo::RqblEigensource{cfg.b, cfg.steps, cfg.seed};
  throw Error(ErrorCode::InvalidArgument, "eigensource must be dense or rqbl");
}

struct QgldValue {
  io::json report;
  double total = 0.0;
};

QgldValue run_qgld_once(const QgldConfig& cfg, const ComplexMatrix& x, const CVector& phi, const EncodingFlags& flags) {
  const std::size_t n = x.rows();
  QgldValue v;
  if (cfg.mode == "per-eigenvector") {
    algo::InverseExpectationRequest req;
    req.x = x;
    req.phi = phi;
    req.k = cfg.k.value_or(n);
    req.enc = make_encoding(flags, 1.0);
    req.source = make_source(cfg);
    req.pseudo_inverse = cfg.pseudo_inverse;
    req.with_reference = !cfg.pseudo_inverse && req.k == n;
    const auto rep = algo::qgld_expectation(req);
    v.total = rep.total;
    v.report["mode"] = cfg.mode;
    const io::json body = algo::to_json(rep);
    for (const auto& [key, val] : body.items()) v.report[key] = val;
    return v;
  }
  if (cfg.mode == "sigma" || cfg.mode == "sampled") {
    const auto enc = make_encoding(flags, algo::sigma_gradient_scale(x, phi));
    v.report["mode"] = cfg.mode;
    if (cfg.mode == "sigma") {
      const auto rep = algo::sigma_qgld_expectation(x, phi, enc);
      v.total = rep.total;
      v.report["total"] = rep.total;
      v.report["readout_phase"] = rep.readout_phase;
      v.report["cancellation_residual"] = rep.cancellation_residual;
    } else {
      const std::size_t samples = cfg.samples == 0 ? n : cfg.samples;
      const auto est = algo::sampled_qgld(x, phi, samples, cfg.seed, enc);
      v.total = est.estimate;
      v.report["total"] = est.estimate;
      v.report["spread"] = est.spread;
      v.report["n_samples"] = samples;
      v.report["seed"] = cfg.seed;
      v.report["samples"] = est.samples;
    }
    v.report["classical_reference"] = algo::classical_reference_expectation(x, phi);
    v.report["encoding"] = algo::to_json(enc);
    return v;
  }
  throw Error(ErrorCode::InvalidArgument, "mode must be per-eigenvector, sigma or sampled");
}

}  // namespace

int cmd_qgld(const QgldConfig& cfg, std::ostream& out) {
  const ComplexMatrix x = load_matrix(cfg.matrix, cfg.seed);
  const CVector phi = load_phi(cfg.phi, x.rows(), cfg.seed);
  if (cfg.sweep_l.empty()) {
    const auto v = run_qgld_once(cfg, x, phi, cfg.enc);
    if (cfg.format == Format::json) {
      write_json(out, v.report);
    } else {
      out << "mode,total,classical_reference\n" << cfg.mode << ',' << fmt(v.total) << ','
          << (v.report["classical_reference"].is_number() ? fmt(v.report["classical_reference"].get<double>()) : "")
          << '\n';
    }
    return kExitOk;
  }
  const double reference = algo::classical_reference_expectation(x, phi);
  io::json rows = io::json::array();
  if (cfg.format == Format::csv) out << "L,total,classical_reference,abs_error\n";
  for (const double l : cfg.sweep_l) {
    EncodingFlags flags = cfg.enc;
    flags.L = l;
    const auto v = run_qgld_once(cfg, x, phi, flags);
    const double err = std::abs(v.total - reference);
    if (cfg.format == Format::csv) {
      out << fmt(l) << ',' << fmt(v.total) << ',' << fmt(reference) << ',' << fmt(err) << '\n';
    } else {
      rows.push_back({{"L", l}, {"total", v.total}, {"classical_reference", reference}, {"abs_error", err}});
    }
  }
  if (cfg.format == Format::json) write_json(out, {{"mode", cfg.mode}, {"sweep", rows}});
  return kExitOk;
}

int cmd_lanczos(const LanczosConfig& cfg, std::ostream& out) {
  const ComplexMatrix x = load_matrix(cfg.matrix, cfg.seed);
  const auto f = lanczos::rqbl_factorize(x, cfg.b, cfg.k, cfg.seed);
  const auto ritz = lanczos::assemble_and_solve(x, f);
  if (cfg.format == Format::json) {
    write_json(out, {{"factorization", lanczos::to_json(f)}, {"ritz", lanczos::to_json(ritz)}});
    return kExitOk;
  }
  out << "rank,value,residual\n";
  for (std::size_t i = 0; i < ritz.size(); ++i) out << i + 1 << ',' << fmt(ritz.values[i]) << ',' << fmt(ritz.residuals[i]) << '\n';
  return kExitOk;
}

int cmd_kernel_demo(const KernelDemoConfig& cfg, std::ostream& out) {
  if (cfg.points < 2) throw Error(ErrorCode::InvalidArgument, "kernel demo needs at least two points");
  std::vector<algo::Point> pts;
  std::vector<double> f;
  const double span = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const double x = span * static_cast<double>(i) / static_cast<double>(cfg.points - 1);
    pts.push_back({x});
    f.push_back(std::sin(x));
  }
  const auto classical = algo::kernel_fit(pts, f, cfg.sigma, cfg.lambda);
  algo::QgldSolver solver;
  solver.enc = make_encoding(cfg.enc, 1.0);
  const auto quantum = algo::kernel_fit(pts, f, cfg.sigma, cfg.lambda, solver);

  double alpha_diff = 0.0;
  for (std::size_t i = 0; i < cfg.points; ++i) alpha_diff = std::max(alpha_diff, std::abs(classical.alpha[i] - quantum.alpha[i]));
  double err_c = 0.0;
  double err_q = 0.0;
  for (std::size_t h = 0; h < cfg.holdout; ++h) {
    const std::vector<double> x{span * (static_cast<double>(h) + 0.5) / static_cast<double>(cfg.holdout)};
    err_c = std::max(err_c, std::abs(algo::kernel_predict(classical, x) - std::sin(x[0])));
    err_q = std::max(err_q, std::abs(algo::kernel_predict(quantum, x) - std::sin(x[0])));
  }

  if (cfg.format == Format::json) {
    write_json(out, {{"classical", algo::to_json(classical)},
                     {"qgld", algo::to_json(quantum)},
                     {"alpha_max_abs_diff", alpha_diff},
                     {"holdout_points", cfg.holdout},
                     {"holdout_max_error_classical", err_c},
                     {"holdout_max_error_qgld", err_q}});
    return kExitOk;
  }
  out << "i,x,target,alpha_classical,alpha_qgld,abs_diff\n";
  for (std::size_t i = 0; i < cfg.points; ++i) {
    out << i + 1 << ',' << fmt(pts[i][0]) << ',' << fmt(f[i]) << ',' << fmt(classical.alpha[i]) << ','
        << fmt(quantum.alpha[i]) << ',' << fmt(std::abs(classical.alpha[i] - quantum.alpha[i])) << '\n';
  }
  return kExitOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "qgld: " << e.what() << '\n';
    return is_numerical(e.code()) ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    err << "qgld: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace qgld::cli
