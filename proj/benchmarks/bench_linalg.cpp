#include <benchmark/benchmark.h>

#include "binfac/decompose.hpp"
#include "binfac/matrix.hpp"
#include "binfac/solve.hpp"

using namespace binfac;

namespace {

Matrixd random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrixd m(rows, cols);
    for (auto& v : m.values()) v = rng.next_normal();
    return m;
}

void BM_matmul_square(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const Matrixd a = random_matrix(n, n, rng);
    const Matrixd b = random_matrix(n, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * n * n * 2);
}
BENCHMARK(BM_matmul_square)->Arg(64)->Arg(128)->Arg(256);

// The batch-by-layer product shape dominating MNIST training.
void BM_matmul_batch_layer(benchmark::State& state) {
    Rng rng(2);
    Matrixf x(100, 784);
    Matrixf wt(784, 300);
    for (auto& v : x.values()) v = static_cast<float>(rng.next_double());
    for (auto& v : wt.values()) v = static_cast<float>(rng.next_normal());
    for (auto _ : state) benchmark::DoNotOptimize(matmul(x, wt));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 100 * 784 * 300 * 2);
}
BENCHMARK(BM_matmul_batch_layer);

void BM_solve_linear(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    Matrixd s(n, n);
    for (auto& v : s.values()) v = rng.next_double() < 0.5 ? 1.0 : -1.0;
    const Matrixd b = random_matrix(n, 8, rng);
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(solve_linear(s, b));
        } catch (const SingularError&) {
        }
    }
}
BENCHMARK(BM_solve_linear)->Arg(16)->Arg(64);

void BM_sign_decompose_full(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng data_rng(4);
    const Matrixd b = random_matrix(n, n, data_rng);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(seed++);
        benchmark::DoNotOptimize(sign_decompose_full(b, rng));
    }
}
BENCHMARK(BM_sign_decompose_full)->Arg(8)->Arg(16);

void BM_sign_decompose_rank(benchmark::State& state) {
    Rng data_rng(5);
    const Matrixd z0 = random_sign_matrix(8, 4, 0.5, data_rng).unpack();
    const Matrixd a0 = random_matrix(4, 6, data_rng);
    const Matrixd b = matmul(z0, a0);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(seed++);
        benchmark::DoNotOptimize(sign_decompose_rank(b, 4, 200, rng));
    }
}
BENCHMARK(BM_sign_decompose_rank);

void BM_reconstruct(benchmark::State& state) {
    Rng rng(6);
    const Factorization f{random_sign_matrix(300, 150, 0.5, rng), random_matrix(150, 784, rng)};
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(f));
}
BENCHMARK(BM_reconstruct);

} // namespace
