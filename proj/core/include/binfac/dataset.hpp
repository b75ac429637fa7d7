#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binfac/matrix.hpp"
#include "binfac/rng.hpp"

namespace binfac {

// Labeled sample set. Images are row vectors normalized to [0, 1];
// labels are class indices in 0..9.
struct Dataset {
    Matrixf images;
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return images.cols(); }

    void validate() const {
        if (images.rows() != labels.size())
            throw DimensionError("Dataset: image row count does not match label count");
    }
};

// Epoch batching: a Fisher-Yates shuffle of 0..n-1 seeded by epoch_seed
// (use derive_seed(global_seed, epoch)), chunked into batches of
// batch_size with the last partial batch retained.
std::vector<std::vector<std::uint32_t>> batch_indices(std::size_t n, std::size_t batch_size,
                                                      std::uint64_t epoch_seed);

// Copies the selected rows into a batch matrix / label vector,
// converting pixels to the requested scalar type.
template <typename T>
void gather_batch(const Dataset& ds, std::span<const std::uint32_t> idx, Matrix<T>& images,
                  std::vector<std::uint8_t>& labels) {
    const std::size_t d = ds.dim();
    if (images.rows() != idx.size() || images.cols() != d) images = Matrix<T>(idx.size(), d);
    labels.resize(idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const float* src = ds.images.row(idx[b]);
        T* dst = images.row(b);
        for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<T>(src[j]);
        labels[b] = ds.labels[idx[b]];
    }
}

} // namespace binfac
