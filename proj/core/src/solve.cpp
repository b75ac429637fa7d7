#include "binfac/solve.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace binfac {

Matrixd solve_linear(const Matrixd& s, const Matrixd& b) {
    if (s.rows() != s.cols()) throw DimensionError("solve_linear: matrix is not square");
    if (s.rows() != b.rows()) throw DimensionError("solve_linear: right-hand side row mismatch");

    const std::size_t n = s.rows();
    const std::size_t m = b.cols();
    const double pivot_floor = 1e-12 * max_abs(s);

    Matrixd lu = s;
    Matrixd x = b;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = col;
        double pivot_mag = std::abs(lu(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::abs(lu(r, col));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if (pivot_mag < pivot_floor || pivot_mag == 0.0)
            throw SingularError("solve_linear: pivot " + std::to_string(pivot_mag) +
                                " below threshold at column " + std::to_string(col));
        if (pivot_row != col) {
            for (std::size_t j = col; j < n; ++j) std::swap(lu(col, j), lu(pivot_row, j));
            for (std::size_t j = 0; j < m; ++j) std::swap(x(col, j), x(pivot_row, j));
        }
        const double pivot = lu(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = lu(r, col) / pivot;
            if (factor == 0.0) continue;
            lu(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= factor * lu(col, j);
            for (std::size_t j = 0; j < m; ++j) x(r, j) -= factor * x(col, j);
        }
    }

    for (std::size_t ri = n; ri-- > 0;) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = x(ri, j);
            for (std::size_t k = ri + 1; k < n; ++k) acc -= lu(ri, k) * x(k, j);
            x(ri, j) = acc / lu(ri, ri);
        }
    }
    return x;
}

} // namespace binfac
