#include "binfac/sign_matrix.hpp"

namespace binfac {

SignMatrix::SignMatrix(std::size_t rows, std::size_t cols, SignConvention convention)
    : rows_(rows), cols_(cols), convention_(convention), words_((rows * cols + 63) / 64, 0) {}

Matrixd SignMatrix::unpack() const {
    Matrixd out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(i, j) = value(i, j);
    return out;
}

SignMatrix random_sign_matrix(std::size_t n, std::size_t r, double p, Rng& rng) {
    if (n == 0 || r == 0) throw DimensionError("random_sign_matrix: zero dimension");
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("random_sign_matrix: p must lie strictly inside (0, 1)");
    SignMatrix out(n, r, SignConvention::PlusMinusOne);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j) out.set_bit(i, j, rng.next_double() < p);
    return out;
}

} // namespace binfac
