#include "qgld/lanczos/rqbl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qgld/error.hpp"
#include "qgld/io/json_io.hpp"
#include "qgld/util/rng.hpp"

namespace qgld::lanczos {
namespace {

constexpr double kBreakdownRel = 1e-10;

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return (a + a.adjoint()) * cplx{0.5}; }

void project_out(ComplexMatrix& r, const ComplexMatrix& q) { r -= q * adjoint_times(q, r); }

}  // namespace

ComplexMatrix LanczosFactorization::basis() const {
  if (basis_blocks.empty()) return {};
  const std::size_t n = basis_blocks.front().rows();
  ComplexMatrix q(n, basis_blocks.size() * b);
  for (std::size_t p = 0; p < basis_blocks.size(); ++p)
    for (std::size_t c = 0; c < b; ++c) q.set_column(p * b + c, basis_blocks[p].matrix().column(c));
  return q;
}

linalg::OrthonormalBlock rqbl_init(std::size_t n, std::size_t b, std::uint64_t rng_seed) {
  if (b < 1 || b > n) {
    throw Error(ErrorCode::InvalidArgument, "block size " + std::to_string(b) + " outside [1, " + std::to_string(n) + "]");
  }
  Xoshiro256 rng(rng_seed);
  return linalg::orthonormalize_svd(gaussian_matrix(n, b, rng));
}

StepResult rqbl_step(const ComplexMatrix& x, std::span<const linalg::OrthonormalBlock> previous,
                     const ComplexMatrix& b_p) {
  if (previous.empty()) throw Error(ErrorCode::InvalidArgument, "rqbl_step needs Psi_p");
  const ComplexMatrix& psi = previous.back().matrix();
  if (x.rows() != psi.rows() || !x.square()) throw Error(ErrorCode::DimensionMismatch, "X and Psi_p shapes");

  StepResult out;
  const ComplexMatrix xpsi = x * psi;
  out.a = hermitian_part(adjoint_times(psi, xpsi));
  ComplexMatrix r = xpsi - psi * out.a;
  if (previous.size() >= 2) {
    if (b_p.rows() != psi.cols() || b_p.cols() != psi.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "B_p must be b x b");
    }
    r -= previous[previous.size() - 2].matrix() * b_p.adjoint();
  }
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : previous) project_out(r, q.matrix());

  out.b = linalg::psd_sqrt(hermitian_part(adjoint_times(r, r)));
  const auto sv = linalg::eig_hermitian(out.b).values;
  out.min_singular = std::max(0.0, sv.front());
  if (out.min_singular < kBreakdownRel * x.frobenius_norm() || previous.size() * psi.cols() >= x.rows()) {
    out.breakdown = true;
    return out;
  }
  out.next = linalg::orthonormalize_svd(r).matrix();
  return out;
}

ComplexMatrix assemble_tridiagonal(const LanczosFactorization& f) {
  const std::size_t k = f.steps();
  const std::size_t b = f.b;
  ComplexMatrix s(k * b, k * b);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j) s(p * b + i, p * b + j) = f.a_blocks[p](i, j);
    if (p + 1 < k) {
      const ComplexMatrix& bb = f.b_blocks[p];
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) {
          s((p + 1) * b + i, p * b + j) = bb(i, j);
          s(p * b + j, (p + 1) * b + i) = std::conj(bb(i, j));
        }
    }
  }
  return s;
}

RitzSolution assemble_and_solve(const ComplexMatrix& x, const LanczosFactorization& f) {
  if (f.steps() == 0) throw Error(ErrorCode::InvalidArgument, "factorization has no blocks");
  const auto eig = linalg::eig_hermitian(assemble_tridiagonal(f));
  const ComplexMatrix lifted = f.basis() * eig.vectors;

  std::vector<std::size_t> order(eig.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    const double al = std::abs(eig.values[l]);
    const double ar = std::abs(eig.values[r]);
    if (al != ar) return al > ar;
    return eig.values[l] > eig.values[r];
  });

  RitzSolution out;
  out.vectors = ComplexMatrix(x.rows(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    CVector v = lifted.column(order[i]);
    const double nv = norm2(v);
    for (auto& z : v) z /= nv;
    const double lambda = eig.values[order[i]];
    CVector r = x * v;
    for (std::size_t t = 0; t < r.size(); ++t) r[t] -= lambda * v[t];
    out.values.push_back(lambda);
    out.residuals.push_back(norm2(r));
    out.vectors.set_column(i, v);
  }
  return out;
}

LanczosFactorization rqbl_factorize(const ComplexMatrix& x, std::size_t b, std::size_t k, std::uint64_t rng_seed) {
  if (!x.square() || x.empty()) throw Error(ErrorCode::DimensionMismatch, "X must be square");
  if (!x.is_hermitian()) throw Error(ErrorCode::NonHermitianInput, "X defect " + std::to_string(x.hermiticity_defect()));
  if (k < 1 || b < 1 || k * b > x.rows()) {
    throw Error(ErrorCode::InvalidArgument, "need 1 <= b, 1 <= k, k*b <= N; got b=" + std::to_string(b) +
                                                " k=" + std::to_string(k) + " N=" + std::to_string(x.rows()));
  }
  LanczosFactorization f;
  f.b = b;
  f.basis_blocks.push_back(rqbl_init(x.rows(), b, rng_seed));
  f.orthonormality_history.push_back(linalg::OrthonormalBlock::orthonormality_error(f.basis_blocks.back().matrix()));
  ComplexMatrix b_p;
  for (std::size_t p = 0; p < k; ++p) {
    StepResult st = rqbl_step(x, f.basis_blocks, b_p);
    f.a_blocks.push_back(std::move(st.a));
    if (p + 1 == k) break;
    if (st.breakdown) {
      f.breakdown = true;
      break;
    }
    f.b_blocks.push_back(st.b);
    f.basis_blocks.emplace_back(std::move(st.next), 1e-10);
    f.orthonormality_history.push_back(linalg::OrthonormalBlock::orthonormality_error(f.basis()));
    b_p = std::move(st.b);
  }
  return f;
}

RitzSolution run_rqbl(const ComplexMatrix& x, std::size_t b, std::size_t k, std::uint64_t rng_seed) {
  return assemble_and_solve(x, rqbl_factorize(x, b, k, rng_seed));
}

nlohmann::ordered_json to_json(const LanczosFactorization& f) {
  nlohmann::ordered_json j;
  j["b"] = f.b;
  j["steps"] = f.steps();
  j["breakdown"] = f.breakdown;
  auto blocks = [](const std::vector<ComplexMatrix>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : v) arr.push_back(io::block_to_json(m));
    return arr;
  };
  j["A"] = blocks(f.a_blocks);
  j["B"] = blocks(f.b_blocks);
  auto psi = nlohmann::ordered_json::array();
  for (const auto& q : f.basis_blocks) psi.push_back(io::block_to_json(q.matrix()));
  j["Psi"] = std::move(psi);
  j["orthonormality_history"] = f.orthonormality_history;
  return j;
}

nlohmann::ordered_json to_json(const RitzSolution& r) {
  nlohmann::ordered_json j;
  j["values"] = r.values;
  j["residuals"] = r.residuals;
  j["vectors"] = io::block_to_json(r.vectors);
  return j;
}

}  // namespace qgld::lanczos
