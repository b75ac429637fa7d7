#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "binfac/matrix.hpp"
#include "binfac/rng.hpp"

namespace binfac {

enum class SignConvention : std::uint8_t { PlusMinusOne = 0, ZeroOne = 1 };

// Bit-packed matrix over {-1,+1} or {0,1}. Entry (i, j) lives at flat
// index e = i*cols + j, stored in words()[e / 64] at bit (e % 64), LSB
// first. A set bit means +1 (PlusMinusOne) or 1 (ZeroOne). Trailing pad
// bits of the last word are always zero, so word-level comparisons and
// hashes are well defined.
class SignMatrix {
public:
    SignMatrix() = default;
    SignMatrix(std::size_t rows, std::size_t cols, SignConvention convention);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return rows_ * cols_; }
    SignConvention convention() const { return convention_; }

    bool bit(std::size_t i, std::size_t j) const {
        const std::size_t e = i * cols_ + j;
        return (words_[e >> 6] >> (e & 63)) & 1u;
    }

    void set_bit(std::size_t i, std::size_t j, bool value) {
        const std::size_t e = i * cols_ + j;
        const std::uint64_t mask = std::uint64_t(1) << (e & 63);
        if (value)
            words_[e >> 6] |= mask;
        else
            words_[e >> 6] &= ~mask;
    }

    // Numeric value of an entry under the convention.
    double value(std::size_t i, std::size_t j) const {
        if (convention_ == SignConvention::PlusMinusOne) return bit(i, j) ? 1.0 : -1.0;
        return bit(i, j) ? 1.0 : 0.0;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    std::size_t ones_count() const {
        std::size_t total = 0;
        for (const std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
        return total;
    }

    Matrixd unpack() const;

    // Packs a real matrix whose entries are exactly the admissible
    // values of the convention; anything else throws.
    template <typename T>
    static SignMatrix pack(const Matrix<T>& m, SignConvention convention) {
        SignMatrix out(m.rows(), m.cols(), convention);
        const double lo = convention == SignConvention::PlusMinusOne ? -1.0 : 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                const double v = static_cast<double>(m(i, j));
                if (v == 1.0)
                    out.set_bit(i, j, true);
                else if (v != lo)
                    throw Error("SignMatrix::pack: entry " + std::to_string(v) +
                                " is not admissible for this convention");
            }
        }
        return out;
    }

    bool operator==(const SignMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    SignConvention convention_ = SignConvention::PlusMinusOne;
    std::vector<std::uint64_t> words_;
};

// Each entry is +1 with probability p, -1 otherwise, drawn row-major.
// Requires 0 < p < 1 and nonzero dimensions.
SignMatrix random_sign_matrix(std::size_t n, std::size_t r, double p, Rng& rng);

} // namespace binfac
