#pragma once

#include "binfac/matrix.hpp"
#include "binfac/sign_matrix.hpp"

namespace binfac {

// W = Z * A with Z a packed sign component (n x r) and A real (r x m).
struct Factorization {
    SignMatrix z;
    Matrixd a;

    std::size_t rows() const { return z.rows(); }
    std::size_t cols() const { return a.cols(); }
    std::size_t inner_dim() const { return z.cols(); }
    SignConvention convention() const { return z.convention(); }

    void validate() const {
        if (z.cols() != a.rows())
            throw DimensionError("Factorization: inner dimensions disagree (" +
                                 std::to_string(z.cols()) + " vs " + std::to_string(a.rows()) +
                                 ")");
    }
};

// W = Z * A computed by signed accumulation of rows of A: rows are
// added where the bit is set and, under PlusMinusOne, subtracted where
// it is clear. No multiplications by the sign entries are performed.
Matrixd reconstruct(const Factorization& f);

// Exact reconstruction-preserving map from a PlusMinusOne factorization
// to a ZeroOne one with inner dimension r+1:
//   Z' = [ (Z+1)/2 | 1 ],  A' = [ 2A ; -(1^T A) ]
// so that Z'A' == ZA up to floating-point associativity.
Factorization to_zero_one(const Factorization& f);

} // namespace binfac
