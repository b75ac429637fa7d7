#pragma once

#include <string>

#include "binfac/dataset.hpp"

namespace binfac {

// IDX image file: big-endian magic 0x00000803, dims [N, 28, 28],
// unsigned pixel bytes. Returns N x 784 rows normalized to [0, 1].
// Gzip-compressed files are detected by their magic and decompressed
// transparently. Malformed content throws FormatError; missing files
// throw IoError.
Matrixf load_idx_images(const std::string& path);

// IDX label file: big-endian magic 0x00000801, N unsigned bytes, each
// in 0..9.
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

// Loads the standard split from a directory containing
// {train,t10k}-{images-idx3,labels-idx1}-ubyte, optionally with a .gz
// suffix.
Dataset load_mnist(const std::string& dir, bool train_split);

} // namespace binfac
