#include "binfac/dataset.hpp"

#include <numeric>

namespace binfac {

std::vector<std::vector<std::uint32_t>> batch_indices(std::size_t n, std::size_t batch_size,
                                                      std::uint64_t epoch_seed) {
    if (batch_size == 0) throw ConfigError("batch_indices: batch_size must be >= 1");

    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);

    Rng rng(epoch_seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(perm[i - 1], perm[j]);
    }

    std::vector<std::vector<std::uint32_t>> batches;
    batches.reserve((n + batch_size - 1) / batch_size);
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(n, start + batch_size);
        batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                             perm.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

} // namespace binfac
