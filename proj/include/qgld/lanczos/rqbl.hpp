#pragma once

// Randomized block Lanczos run as dense linear algebra. The Krylov basis is
// stored block by block and fully reorthogonalized at every step.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "qgld/linalg/dense.hpp"
#include "qgld/linalg/matrix.hpp"

namespace qgld::lanczos {

struct LanczosFactorization {
  std::size_t b = 0;
  std::vector<ComplexMatrix> a_blocks;                // A_p = Psi_p^dagger X Psi_p
  std::vector<ComplexMatrix> b_blocks;                // B_1 .. B_{k-1}
  std::vector<linalg::OrthonormalBlock> basis_blocks;  // Psi_0 .. Psi_{k-1}
  // max |Q^dagger Q - I| over the accumulated basis after each block.
  std::vector<double> orthonormality_history;
  bool breakdown = false;  // stopped early on an invariant subspace

  std::size_t steps() const noexcept { return a_blocks.size(); }
  // N x (steps * b) concatenation of the basis blocks.
  ComplexMatrix basis() const;
};

struct StepResult {
  ComplexMatrix a;     // A_p
  ComplexMatrix b;     // B_{p+1} = (R^dagger R)^{1/2}
  ComplexMatrix next;  // Psi_{p+1}; empty on breakdown
  double min_singular = 0.0;
  bool breakdown = false;
};

struct RitzSolution {
  std::vector<double> values;  // |lambda| descending, ties by lambda descending
  ComplexMatrix vectors;       // N x r, column i pairs with values[i]
  std::vector<double> residuals;

  std::size_t size() const noexcept { return values.size(); }
  CVector vector(std::size_t i) const { return vectors.column(i); }
};

// Gaussian N x b block made orthonormal by its polar factor.
linalg::OrthonormalBlock rqbl_init(std::size_t n, std::size_t b, std::uint64_t rng_seed);

// One three-term step from Psi_p = previous.back(). `b_p` is B_p (empty for
// p = 0); every block in `previous` is projected out of R twice before B_{p+1}
// is formed. Breakdown when sigma_min(R) < 1e-10 ||X||_F.
StepResult rqbl_step(const ComplexMatrix& x, std::span<const linalg::OrthonormalBlock> previous,
                     const ComplexMatrix& b_p);

// Block tridiagonal S: A_p on the diagonal, B_{p+1} below it, B_{p+1}^dagger above.
ComplexMatrix assemble_tridiagonal(const LanczosFactorization& f);

RitzSolution assemble_and_solve(const ComplexMatrix& x, const LanczosFactorization& f);

// Init plus up to k steps. Requires 1 <= b, k and k * b <= N.
LanczosFactorization rqbl_factorize(const ComplexMatrix& x, std::size_t b, std::size_t k, std::uint64_t rng_seed);

RitzSolution run_rqbl(const ComplexMatrix& x, std::size_t b, std::size_t k, std::uint64_t rng_seed);

nlohmann::ordered_json to_json(const LanczosFactorization& f);
nlohmann::ordered_json to_json(const RitzSolution& r);

}  // namespace qgld::lanczos
