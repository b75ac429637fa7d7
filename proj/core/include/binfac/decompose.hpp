#pragma once

#include <vector>

#include "binfac/factorization.hpp"
#include "binfac/rng.hpp"

namespace binfac {

// Exact sign-component decomposition with inner dimension r = n: draws
// Z in {-1,+1}^{n x n} uniformly and solves Z A = B. Singular draws are
// retried; exhausting max_retries throws DecompositionError. The
// returned factorization satisfies ||ZA - B||_F / max(||B||_F, 1) <= 1e-9.
Factorization sign_decompose_full(const Matrixd& b, Rng& rng, int max_retries = 32);

struct RankDecomposition {
    Factorization factorization;
    double residual; // ||ZA - B||_F / max(||B||_F, 1) at the end
    std::vector<double> sweep_residuals; // one entry per completed sweep, non-increasing
};

// Heuristic reduced-rank decomposition (1 <= r <= n) by alternating
// minimization: a least-squares update of A (ridge 1e-10 * trace on
// Z^T Z only when the plain system is singular) alternated with
// coordinate descent over the entries of Z, flipping a sign exactly
// when the flip strictly decreases ||ZA - B||_F. Scan order is
// row-major and fixed. Stops after max_sweeps or a sweep with no flips.
// The residual never increases across steps. For r == n the result is
// checked against sign_decompose_full and the better of the two is
// returned, so full-rank calls match the exact path's quality.
RankDecomposition sign_decompose_rank(const Matrixd& b, std::size_t r, int max_sweeps, Rng& rng);

} // namespace binfac
