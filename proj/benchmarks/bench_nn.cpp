#include <benchmark/benchmark.h>

#include "binfac/experiment.hpp"
#include "binfac/network.hpp"

using namespace binfac;

namespace {

Matrixf random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrixf m(rows, cols);
    for (auto& v : m.values()) v = static_cast<float>(rng.next_double());
    return m;
}

std::vector<std::uint8_t> random_labels(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> labels(n);
    for (auto& y : labels) y = static_cast<std::uint8_t>(rng.next_below(10));
    return labels;
}

void BM_forward(benchmark::State& state, const char* mask) {
    Rng rng(1);
    const auto net = init_network<float>(lenet_spec(mask), rng);
    const Matrixf batch = random_batch(100, 784, 2);
    for (auto _ : state) benchmark::DoNotOptimize(forward(net, batch));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 100);
}
BENCHMARK_CAPTURE(BM_forward, dense, "0-0-0");
BENCHMARK_CAPTURE(BM_forward, factorized, "1-1-1");

void BM_train_step(benchmark::State& state, const char* mask) {
    Rng rng(1);
    auto net = init_network<float>(lenet_spec(mask), rng);
    auto adam = init_adam(net);
    const Matrixf batch = random_batch(100, 784, 2);
    const auto labels = random_labels(100, 3);
    const std::vector<double> reg = {1e-5, 2.5e-5, 1.5e-4};
    for (auto _ : state) {
        auto [loss, grads] = loss_and_gradients(net, batch, labels, 0.5, reg);
        benchmark::DoNotOptimize(loss);
        adam_step(net, grads, adam, 1e-3);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 100);
}
BENCHMARK_CAPTURE(BM_train_step, dense, "0-0-0");
BENCHMARK_CAPTURE(BM_train_step, factorized, "1-1-1");

} // namespace
