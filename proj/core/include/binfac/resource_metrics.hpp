#pragma once

#include <cstdint>
#include <string>

#include "binfac/network.hpp"

namespace binfac {

struct ParamCounts {
    std::uint64_t real_count = 0;
    std::uint64_t binary_count = 0;

    ParamCounts& operator+=(const ParamCounts& other) {
        real_count += other.real_count;
        binary_count += other.binary_count;
        return *this;
    }
    bool operator==(const ParamCounts&) const = default;
};

// Dense layers contribute n*m + n real parameters; factorized layers
// contribute n*r binary plus r*m + n real. The inner dimension stays r
// across the in-place +/-1 -> {0,1} convention switch (no augmentation
// happens during training).
template <typename T>
ParamCounts count_params(const LayerState<T>& layer) {
    ParamCounts c;
    if (const auto* dense = std::get_if<DenseLayer<T>>(&layer)) {
        c.real_count = static_cast<std::uint64_t>(dense->w.size()) + dense->bias.size();
    } else {
        const auto& fac = std::get<FactorizedLayer<T>>(layer);
        c.binary_count = static_cast<std::uint64_t>(fac.z.size());
        c.real_count = static_cast<std::uint64_t>(fac.a.size()) + fac.bias.size();
    }
    return c;
}

template <typename T>
ParamCounts count_params(const Network<T>& net) {
    ParamCounts total;
    for (const LayerState<T>& layer : net.layers) total += count_params(layer);
    return total;
}

// 32 bits per real-valued parameter plus 1 bit per binary parameter.
inline std::uint64_t memory_bits(const ParamCounts& c) {
    return 32 * c.real_count + c.binary_count;
}

template <typename T>
std::uint64_t memory_bits(const LayerState<T>& layer) {
    return memory_bits(count_params(layer));
}

template <typename T>
std::uint64_t memory_bits(const Network<T>& net) {
    return memory_bits(count_params(net));
}

// Single-sample FLOP-equivalents. A multiply-accumulate counts as 2
// FLOPs; binary-real products are discounted by 16; bias addition and
// activation each count n per layer.
template <typename T>
double flop_equivalents(const LayerState<T>& layer) {
    if (const auto* dense = std::get_if<DenseLayer<T>>(&layer)) {
        const double n = static_cast<double>(dense->w.rows());
        const double m = static_cast<double>(dense->w.cols());
        return 2.0 * n * m + 2.0 * n;
    }
    const auto& fac = std::get<FactorizedLayer<T>>(layer);
    const double n = static_cast<double>(fac.z.rows());
    const double r = static_cast<double>(fac.z.cols());
    const double m = static_cast<double>(fac.a.cols());
    return 2.0 * r * m + (2.0 * n * r) / 16.0 + 2.0 * n;
}

template <typename T>
double flop_equivalents(const Network<T>& net) {
    double total = 0.0;
    for (const LayerState<T>& layer : net.layers) total += flop_equivalents(layer);
    return total;
}

// Total parameters divided by the number with |value| > tol. Binary
// {0,1} entries equal to zero count as zeros. Throws when every
// parameter is below tol (degenerate network).
template <typename T>
double sparsity(const Network<T>& net, double tol = 0.0) {
    if (tol < 0.0) throw ConfigError("sparsity: tol must be >= 0");
    std::uint64_t total = 0;
    std::uint64_t nonzero = 0;
    auto scan = [&](const T* data, std::size_t size) {
        total += size;
        for (std::size_t i = 0; i < size; ++i)
            if (std::abs(static_cast<double>(data[i])) > tol) ++nonzero;
    };
    for (const LayerState<T>& layer : net.layers) {
        if (const auto* dense = std::get_if<DenseLayer<T>>(&layer)) {
            scan(dense->w.data(), dense->w.size());
            scan(dense->bias.data(), dense->bias.size());
        } else {
            const auto& fac = std::get<FactorizedLayer<T>>(layer);
            scan(fac.z.data(), fac.z.size());
            scan(fac.a.data(), fac.a.size());
            scan(fac.bias.data(), fac.bias.size());
        }
    }
    if (nonzero == 0) throw Error("sparsity: network has no nonzero parameters");
    return static_cast<double>(total) / static_cast<double>(nonzero);
}

// One experiment row: what the report emitter serializes.
struct ResourceReport {
    std::string config_label;
    std::uint64_t memory_bits = 0;
    double flop_equivalents = 0.0;
    double sparsity = 1.0;
    double error_rate = 0.0;
};

} // namespace binfac
