#include "qgld/linalg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qgld/error.hpp"

namespace qgld::linalg {
namespace {

constexpr int kMaxSweeps = 64;

void require_hermitian(const ComplexMatrix& a, const Tolerances& tol, const char* who) {
  if (!a.square() || a.empty()) throw Error(ErrorCode::DimensionMismatch, std::string(who) + ": matrix must be square");
  if (a.hermiticity_defect() > tol.hermitian * a.max_abs()) {
    throw Error(ErrorCode::NonHermitianInput, std::string(who) + ": defect " + std::to_string(a.hermiticity_defect()));
  }
}

// Applies the unitary G (identity except the (p,q) plane) on the right.
void rotate_columns(ComplexMatrix& m, std::size_t p, std::size_t q, double c, cplx s_phase) {
  const cplx s_conj = std::conj(s_phase);
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const cplx mp = m(k, p);
    const cplx mq = m(k, q);
    m(k, p) = c * mp - s_conj * mq;
    m(k, q) = s_phase * mp + c * mq;
  }
}

void rotate_rows_adjoint(ComplexMatrix& m, std::size_t p, std::size_t q, double c, cplx s_phase) {
  const cplx s_conj = std::conj(s_phase);
  auto rp = m.row(p);
  auto rq = m.row(q);
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const cplx ap = rp[k];
    const cplx aq = rq[k];
    rp[k] = c * ap - s_phase * aq;
    rq[k] = s_conj * ap + c * aq;
  }
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

void fix_phase(ComplexMatrix& v, std::size_t col) {
  for (std::size_t r = 0; r < v.rows(); ++r) {
    const double mag = std::abs(v(r, col));
    if (mag > 1e-12) {
      const cplx ph = std::conj(v(r, col)) / mag;
      for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) *= ph;
      v(r, col) = mag;
      return;
    }
  }
}

struct LuFactors {
  ComplexMatrix lu;
  std::vector<std::size_t> perm;
  int swaps = 0;
};

LuFactors lu_decompose(const ComplexMatrix& a, const Tolerances& tol) {
  if (!a.square() || a.empty()) throw Error(ErrorCode::DimensionMismatch, "LU: matrix must be square");
  const std::size_t n = a.dim();
  LuFactors f{a, std::vector<std::size_t>(n), 0};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const double floor = tol.singular_pivot * a.frobenius_norm();
  ComplexMatrix& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    }
    if (best <= floor) throw Error(ErrorCode::SingularMatrix, "pivot " + std::to_string(best) + " at column " + std::to_string(k));
    if (piv != k) {
      std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(piv).begin());
      std::swap(f.perm[k], f.perm[piv]);
      ++f.swaps;
    }
    const cplx inv_piv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx factor = m(i, k) * inv_piv;
      m(i, k) = factor;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= factor * m(k, j);
    }
  }
  return f;
}

}  // namespace

EigenDecomposition eig_hermitian(const ComplexMatrix& a_in, const Tolerances& tol) {
  require_hermitian(a_in, tol, "eig_hermitian");
  const std::size_t n = a_in.dim();
  // Work on the exactly-hermitian part so rounding in the input cannot bias
  // the rotations.
  ComplexMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a_in(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = 0.5 * (a_in(i, j) + std::conj(a_in(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off <= tol.jacobi * scale) break;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double g = 100.0 * r;
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * r);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx s_phase = s * (apq / r);
        rotate_columns(a, p, q, c, s_phase);
        rotate_rows_adjoint(a, p, q, c, s_phase);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        rotate_columns(v, p, q, c, s_phase);
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    fix_phase(out.vectors, k);
  }
  return out;
}

ComplexMatrix unitary_phase_exp(const EigenDecomposition& eig, double t) {
  const std::size_t n = eig.size();
  ComplexMatrix scaled = eig.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx ph = std::polar(1.0, t * eig.values[k]);
    for (std::size_t r = 0; r < n; ++r) scaled(r, k) *= ph;
  }
  return scaled * eig.vectors.adjoint();
}

ComplexMatrix unitary_phase_exp(const ComplexMatrix& a, double t, const Tolerances& tol) {
  return unitary_phase_exp(eig_hermitian(a, tol), t);
}

cplx logdet_lu(const ComplexMatrix& a, const Tolerances& tol) {
  const LuFactors f = lu_decompose(a, tol);
  double log_mag = 0.0;
  double phase = f.swaps % 2 == 1 ? std::numbers::pi : 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    log_mag += std::log(std::abs(f.lu(i, i)));
    phase += std::arg(f.lu(i, i));
  }
  phase = std::remainder(phase, 2.0 * std::numbers::pi);
  if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
  return {log_mag, phase};
}

ComplexMatrix inverse(const ComplexMatrix& a, const Tolerances& tol) {
  const LuFactors f = lu_decompose(a, tol);
  const std::size_t n = a.dim();
  ComplexMatrix inv(n);
  CVector col(n);
  for (std::size_t c = 0; c < n; ++c) {
    // Solve L U x = P e_c.
    for (std::size_t i = 0; i < n; ++i) col[i] = f.perm[i] == c ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) col[i] -= f.lu(i, k) * col[k];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n; ++k) col[ii] -= f.lu(ii, k) * col[k];
      col[ii] /= f.lu(ii, ii);
    }
    inv.set_column(c, col);
  }
  return inv;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& b2, const Tolerances& tol) {
  EigenDecomposition e = eig_hermitian(b2, tol);
  const double floor = -tol.psd_negative * b2.frobenius_norm();
  for (double& v : e.values) {
    if (v < floor) throw Error(ErrorCode::NotPositiveSemidefinite, "eigenvalue " + std::to_string(v));
    v = v < 0.0 ? 0.0 : std::sqrt(v);
  }
  ComplexMatrix scaled = e.vectors;
  for (std::size_t k = 0; k < e.size(); ++k)
    for (std::size_t r = 0; r < e.size(); ++r) scaled(r, k) *= e.values[k];
  return scaled * e.vectors.adjoint();
}

ComplexMatrix hermitian_pinv(const ComplexMatrix& b, double cutoff) {
  EigenDecomposition e = eig_hermitian(b);
  const double top = e.values.empty() ? 0.0 : std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  ComplexMatrix scaled = e.vectors;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double inv = std::abs(e.values[k]) <= cutoff * top ? 0.0 : 1.0 / e.values[k];
    for (std::size_t r = 0; r < e.size(); ++r) scaled(r, k) *= inv;
  }
  return scaled * e.vectors.adjoint();
}

double OrthonormalBlock::orthonormality_error(const ComplexMatrix& q) {
  const ComplexMatrix g = adjoint_times(q, q);
  double err = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) err = std::max(err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return err;
}

OrthonormalBlock::OrthonormalBlock(ComplexMatrix columns, double tol) : m_(std::move(columns)) {
  if (m_.cols() == 0 || m_.cols() > m_.rows()) throw Error(ErrorCode::DimensionMismatch, "orthonormal block shape");
  const double err = orthonormality_error(m_);
  if (err > tol) throw Error(ErrorCode::InvalidArgument, "columns not orthonormal: " + std::to_string(err));
}

namespace {

ComplexMatrix polar_factor(const ComplexMatrix& block, const Tolerances& tol) {
  const EigenDecomposition g = eig_hermitian(adjoint_times(block, block), tol);
  const double top = std::max(g.values.back(), 0.0);
  const double bottom = std::max(g.values.front(), 0.0);
  if (top == 0.0 || std::sqrt(bottom) <= tol.rank * std::sqrt(top)) {
    throw Error(ErrorCode::RankDeficientBlock,
                "singular value ratio " + std::to_string(top == 0.0 ? 0.0 : std::sqrt(bottom / top)));
  }
  ComplexMatrix scaled = g.vectors;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double inv_sigma = 1.0 / std::sqrt(g.values[k]);
    for (std::size_t r = 0; r < g.size(); ++r) scaled(r, k) *= inv_sigma;
  }
  return block * (scaled * g.vectors.adjoint());
}

}  // namespace

OrthonormalBlock orthonormalize_svd(const ComplexMatrix& block, const Tolerances& tol) {
  if (block.cols() == 0 || block.cols() > block.rows()) {
    throw Error(ErrorCode::RankDeficientBlock, "block has more columns than rows");
  }
  ComplexMatrix q = polar_factor(block, tol);
  // The second pass acts on an almost-orthonormal block and removes the
  // error squared condition numbers leave behind.
  q = polar_factor(q, tol);
  return OrthonormalBlock(std::move(q), 1e-12);
}

namespace {

void check_pair(const ComplexMatrix& a, const ComplexMatrix& delta, std::size_t p, const Tolerances& tol) {
  require_hermitian(a, tol, "directional_eigen_derivative");
  require_hermitian(delta, tol, "directional_eigen_derivative(delta)");
  if (delta.rows() != a.rows() || delta.cols() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "perturbation shape");
  }
  if (p >= a.dim()) throw Error(ErrorCode::IndexOutOfRange, "eigen index " + std::to_string(p));
}

std::pair<std::size_t, std::size_t> cluster_of(const std::vector<double>& values, std::size_t p, double gap) {
  std::size_t lo = p;
  std::size_t hi = p;
  while (lo > 0 && values[lo] - values[lo - 1] <= gap) --lo;
  while (hi + 1 < values.size() && values[hi + 1] - values[hi] <= gap) ++hi;
  return {lo, hi};
}

}  // namespace

double directional_eigen_derivative(const ComplexMatrix& a, const ComplexMatrix& delta, std::size_t p,
                                    const DerivativeMode& mode, const Tolerances& tol) {
  check_pair(a, delta, p, tol);
  if (const auto* cd = std::get_if<CentralDifference>(&mode)) {
    const double h = cd->h;
    const EigenDecomposition plus = eig_hermitian(a + delta * cplx(h), tol);
    const EigenDecomposition minus = eig_hermitian(a - delta * cplx(h), tol);
    return (plus.values[p] - minus.values[p]) / (2.0 * h);
  }
  const EigenDecomposition e = eig_hermitian(a, tol);
  const double gap = tol.degenerate_gap * a.frobenius_norm();
  const auto [lo, hi] = cluster_of(e.values, p, gap);
  if (lo != hi) {
    throw Error(ErrorCode::DegenerateEigenvalue,
                "eigenvalue " + std::to_string(p) + " shares its eigenspace; use degenerate_directional_derivatives");
  }
  const CVector v = e.vector(p);
  return quadratic_form(delta, v).real();
}

std::vector<double> degenerate_directional_derivatives(const ComplexMatrix& a, const ComplexMatrix& delta,
                                                       std::size_t p, const Tolerances& tol) {
  check_pair(a, delta, p, tol);
  const EigenDecomposition e = eig_hermitian(a, tol);
  const auto [lo, hi] = cluster_of(e.values, p, tol.degenerate_gap * a.frobenius_norm());
  const ComplexMatrix basis = e.vectors.columns(lo, hi - lo + 1);
  const ComplexMatrix restricted = adjoint_times(basis, delta * basis);
  return eig_hermitian(restricted, Tolerances{.hermitian = 1e-9}).values;
}

void adapt_degenerate_basis(EigenDecomposition& eig, const ComplexMatrix& delta, double abs_gap) {
  const std::size_t n = eig.size();
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end + 1 < n && eig.values[end + 1] - eig.values[end] <= abs_gap) ++end;
    if (end > start) {
      const std::size_t width = end - start + 1;
      const ComplexMatrix basis = eig.vectors.columns(start, width);
      const ComplexMatrix restricted = adjoint_times(basis, delta * basis);
      const EigenDecomposition inner = eig_hermitian(restricted, Tolerances{.hermitian = 1e-9});
      const ComplexMatrix rotated = basis * inner.vectors;
      for (std::size_t c = 0; c < width; ++c) eig.vectors.set_column(start + c, rotated.column(c));
    }
    start = end + 1;
  }
}

}  // namespace qgld::linalg
