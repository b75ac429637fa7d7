#include "binfac/factorization.hpp"

namespace binfac {

Matrixd reconstruct(const Factorization& f) {
    f.validate();
    const std::size_t n = f.rows();
    const std::size_t r = f.inner_dim();
    const std::size_t m = f.cols();
    const bool plus_minus = f.convention() == SignConvention::PlusMinusOne;

    Matrixd w(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double* wrow = w.row(i);
        for (std::size_t k = 0; k < r; ++k) {
            const double* arow = f.a.row(k);
            if (f.z.bit(i, k)) {
                for (std::size_t j = 0; j < m; ++j) wrow[j] += arow[j];
            } else if (plus_minus) {
                for (std::size_t j = 0; j < m; ++j) wrow[j] -= arow[j];
            }
        }
    }
    return w;
}

Factorization to_zero_one(const Factorization& f) {
    f.validate();
    if (f.convention() != SignConvention::PlusMinusOne)
        throw Error("to_zero_one: input factorization is not in the +/-1 convention");

    const std::size_t n = f.rows();
    const std::size_t r = f.inner_dim();
    const std::size_t m = f.cols();

    // (Z+1)/2 maps +1 -> 1 and -1 -> 0, which is exactly the stored bit
    // pattern; the appended column is all ones.
    SignMatrix z01(n, r + 1, SignConvention::ZeroOne);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k) z01.set_bit(i, k, f.z.bit(i, k));
        z01.set_bit(i, r, true);
    }

    Matrixd a01(r + 1, m);
    for (std::size_t k = 0; k < r; ++k) {
        const double* src = f.a.row(k);
        double* dst = a01.row(k);
        for (std::size_t j = 0; j < m; ++j) dst[j] = 2.0 * src[j];
    }
    double* last = a01.row(r);
    for (std::size_t j = 0; j < m; ++j) {
        double colsum = 0.0;
        for (std::size_t k = 0; k < r; ++k) colsum += f.a(k, j);
        last[j] = -colsum;
    }

    return Factorization{std::move(z01), std::move(a01)};
}

} // namespace binfac
