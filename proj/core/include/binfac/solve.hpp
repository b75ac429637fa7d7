#pragma once

#include "binfac/matrix.hpp"

namespace binfac {

// Solves S X = B for square S by Gaussian elimination with partial
// pivoting. Throws SingularError when the best available pivot falls
// below 1e-12 * max|S|. 64-bit only: this is the factorization /
// oracle path.
Matrixd solve_linear(const Matrixd& s, const Matrixd& b);

} // namespace binfac
