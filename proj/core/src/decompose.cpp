#include "binfac/decompose.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "binfac/solve.hpp"

namespace binfac {

namespace {

Matrixd residual_matrix(const Matrixd& zreal, const Matrixd& a, const Matrixd& b) {
    Matrixd r = matmul(zreal, a);
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] -= b.data()[i];
    return r;
}

// Least-squares A for fixed Z via the normal equations; falls back to a
// ridge of 1e-10 * trace(Z^T Z) when the plain system is singular.
Matrixd least_squares_a(const Matrixd& zreal, const Matrixd& b) {
    Matrixd gram = matmul_tn(zreal, zreal);
    const Matrixd rhs = matmul_tn(zreal, b);
    try {
        return solve_linear(gram, rhs);
    } catch (const SingularError&) {
        double trace = 0.0;
        for (std::size_t k = 0; k < gram.rows(); ++k) trace += gram(k, k);
        const double ridge = 1e-10 * trace;
        for (std::size_t k = 0; k < gram.rows(); ++k) gram(k, k) += ridge;
        return solve_linear(gram, rhs);
    }
}

// Stall repair: per row, enumerate all 2^r sign patterns in Gray-code
// order (one incremental row update per pattern) and keep the best.
// Subsumes any combination of single flips for that row, so it escapes
// local minima the entry sweep cannot. Only run at feasible sizes.
bool exhaustive_row_pass(Matrixd& zreal, const Matrixd& a, const Matrixd& b, Matrixd& resid) {
    const std::size_t n = zreal.rows();
    const std::size_t r = zreal.cols();
    const std::size_t m = a.cols();
    if (r > 12 || (n << r) * m > (std::size_t(1) << 26)) return false;

    bool changed = false;
    std::vector<double> signs(r);
    std::vector<double> rowvec(m);
    for (std::size_t i = 0; i < n; ++i) {
        double* rrow = resid.row(i);
        double current_cost = 0.0;
        for (std::size_t j = 0; j < m; ++j) current_cost += rrow[j] * rrow[j];

        // start from the all-plus pattern
        std::fill(signs.begin(), signs.end(), 1.0);
        std::fill(rowvec.begin(), rowvec.end(), 0.0);
        for (std::size_t k = 0; k < r; ++k) {
            const double* arow = a.row(k);
            for (std::size_t j = 0; j < m; ++j) rowvec[j] += arow[j];
        }
        auto cost_of = [&] {
            double c = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double d = rowvec[j] - b(i, j);
                c += d * d;
            }
            return c;
        };

        double best_cost = cost_of();
        std::uint64_t best_pattern = 0; // Gray-code step index, 0 = all plus
        const std::uint64_t total = std::uint64_t(1) << r;
        for (std::uint64_t step = 1; step < total; ++step) {
            const std::size_t k = static_cast<std::size_t>(std::countr_zero(step));
            signs[k] = -signs[k];
            const double* arow = a.row(k);
            const double scale = 2.0 * signs[k];
            for (std::size_t j = 0; j < m; ++j) rowvec[j] += scale * arow[j];
            const double c = cost_of();
            if (c < best_cost) {
                best_cost = c;
                best_pattern = step;
            }
        }

        if (best_cost < current_cost * (1.0 - 1e-12)) {
            // replay the Gray sequence up to best_pattern to recover signs
            std::fill(signs.begin(), signs.end(), 1.0);
            for (std::uint64_t step = 1; step <= best_pattern; ++step) {
                const std::size_t k = static_cast<std::size_t>(std::countr_zero(step));
                signs[k] = -signs[k];
            }
            for (std::size_t k = 0; k < r; ++k) zreal(i, k) = signs[k];
            for (std::size_t j = 0; j < m; ++j) {
                double acc = -b(i, j);
                for (std::size_t k = 0; k < r; ++k) acc += signs[k] * a(k, j);
                rrow[j] = acc;
            }
            changed = true;
        }
    }
    return changed;
}

} // namespace

Factorization sign_decompose_full(const Matrixd& b, Rng& rng, int max_retries) {
    const std::size_t n = b.rows();
    if (n == 0) throw DimensionError("sign_decompose_full: empty matrix");
    if (max_retries < 1) throw ConfigError("sign_decompose_full: max_retries must be >= 1");

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        SignMatrix z = random_sign_matrix(n, n, 0.5, rng);
        try {
            Matrixd a = solve_linear(z.unpack(), b);
            return Factorization{std::move(z), std::move(a)};
        } catch (const SingularError&) {
            continue;
        }
    }
    throw DecompositionError("sign_decompose_full: " + std::to_string(max_retries) +
                             " singular sign draws in a row");
}

RankDecomposition sign_decompose_rank(const Matrixd& b, std::size_t r, int max_sweeps, Rng& rng) {
    const std::size_t n = b.rows();
    const std::size_t m = b.cols();
    if (r == 0) throw ConfigError("sign_decompose_rank: inner dimension must be >= 1");
    if (r > n) throw ConfigError("sign_decompose_rank: inner dimension exceeds row count");
    if (max_sweeps < 1) throw ConfigError("sign_decompose_rank: max_sweeps must be >= 1");

    const double denom = std::max(frobenius_norm(b), 1.0);
    // A stalled trajectory at this quality is treated as solved; below
    // it restarts would only burn the sweep budget.
    constexpr double kExact = 1e-9;

    Matrixd best_z;
    Matrixd best_a;
    double best_rel = std::numeric_limits<double>::infinity();
    std::vector<double> sweep_residuals;

    Matrixd zreal = random_sign_matrix(n, r, 0.5, rng).unpack();
    Matrixd a(r, m);
    Matrixd resid = residual_matrix(zreal, a, b);
    double resid_norm = frobenius_norm(resid);
    bool repaired_this_trajectory = false;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // A-step. Exact least squares cannot increase the residual; the
        // guard only protects against the ridge fallback.
        Matrixd a_candidate = least_squares_a(zreal, b);
        Matrixd resid_candidate = residual_matrix(zreal, a_candidate, b);
        const double cand_norm = frobenius_norm(resid_candidate);
        if (cand_norm <= resid_norm) {
            a = std::move(a_candidate);
            resid = std::move(resid_candidate);
            resid_norm = cand_norm;
        }

        // Z-step: flip z_jk exactly when it strictly decreases the
        // residual. Flipping changes row j of ZA by delta = -2 z_jk A_k,
        // so the squared-norm change is -4 z <R_j, A_k> + 4 ||A_k||^2.
        std::vector<double> a_row_sq(r, 0.0);
        for (std::size_t k = 0; k < r; ++k) {
            const double* arow = a.row(k);
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += arow[j] * arow[j];
            a_row_sq[k] = s;
        }

        std::size_t flips = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double* rrow = resid.row(i);
            for (std::size_t k = 0; k < r; ++k) {
                const double z = zreal(i, k);
                const double* arow = a.row(k);
                double inner = 0.0;
                for (std::size_t j = 0; j < m; ++j) inner += rrow[j] * arow[j];
                const double change = -4.0 * z * inner + 4.0 * a_row_sq[k];
                if (change < 0.0) {
                    const double scale = -2.0 * z;
                    for (std::size_t j = 0; j < m; ++j) rrow[j] += scale * arow[j];
                    zreal(i, k) = -z;
                    ++flips;
                }
            }
        }

        // Recompute the residual from scratch to drop incremental drift.
        resid = residual_matrix(zreal, a, b);
        resid_norm = frobenius_norm(resid);

        const double rel = resid_norm / denom;
        if (rel < best_rel) {
            best_rel = rel;
            best_z = zreal;
            best_a = a;
        }
        // Reported residuals are best-so-far, non-increasing by
        // construction even across restarts.
        sweep_residuals.push_back(best_rel);

        if (flips == 0) {
            if (best_rel <= kExact) break;
            // Stalled above tolerance: allow one row-exhaustive rescue
            // per trajectory, then restart from a fresh random sign
            // pattern while sweep budget remains, keeping the best.
            if (!repaired_this_trajectory && exhaustive_row_pass(zreal, a, b, resid)) {
                repaired_this_trajectory = true;
                resid_norm = frobenius_norm(resid);
            } else {
                zreal = random_sign_matrix(n, r, 0.5, rng).unpack();
                a = Matrixd(r, m);
                resid = residual_matrix(zreal, a, b);
                resid_norm = frobenius_norm(resid);
                repaired_this_trajectory = false;
            }
        }
    }

    Factorization best{SignMatrix::pack(best_z, SignConvention::PlusMinusOne), std::move(best_a)};

    if (r == n && best_rel > kExact) {
        try {
            Factorization full = sign_decompose_full(b, rng);
            const double full_rel = relative_residual(reconstruct(full), b);
            if (full_rel < best_rel) {
                best = std::move(full);
                best_rel = full_rel;
            }
        } catch (const DecompositionError&) {
            // keep the coordinate-descent result
        }
    }

    return RankDecomposition{std::move(best), best_rel, std::move(sweep_residuals)};
}

} // namespace binfac
