#include "binfac/mnist.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <zlib.h>

namespace binfac {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failure on " + path);
    return bytes;
}

bool is_gzip(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed,
                                 const std::string& path) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    // 15 + 16: zlib header detection off, gzip wrapper on.
    if (inflateInit2(&zs, 15 + 16) != Z_OK) throw Error("zlib: inflateInit2 failed");

    std::vector<std::uint8_t> out;
    out.reserve(compressed.size() * 4);
    std::uint8_t buffer[1 << 16];
    zs.next_in = const_cast<Bytef*>(compressed.data());
    zs.avail_in = static_cast<uInt>(compressed.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buffer;
        zs.avail_out = sizeof(buffer);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("corrupt gzip stream in " + path);
        }
        out.insert(out.end(), buffer, buffer + (sizeof(buffer) - zs.avail_out));
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw FormatError("truncated gzip stream in " + path);
        }
    }
    inflateEnd(&zs);
    return out;
}

std::vector<std::uint8_t> read_maybe_gzipped(const std::string& path) {
    std::vector<std::uint8_t> bytes = read_file(path);
    if (is_gzip(bytes)) return gunzip(bytes, path);
    return bytes;
}

std::uint32_t read_u32_be(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::string resolve(const std::string& dir, const std::string& name) {
    namespace fs = std::filesystem;
    const std::string plain = dir + "/" + name;
    if (fs::exists(plain)) return plain;
    const std::string gz = plain + ".gz";
    if (fs::exists(gz)) return gz;
    throw IoError("missing dataset file " + plain + " (also tried .gz)");
}

} // namespace

Matrixf load_idx_images(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_maybe_gzipped(path);
    if (bytes.size() < 16) throw FormatError(path + ": truncated IDX image header");
    if (read_u32_be(bytes.data()) != 0x00000803u)
        throw FormatError(path + ": bad IDX image magic");
    const std::uint32_t n = read_u32_be(bytes.data() + 4);
    const std::uint32_t h = read_u32_be(bytes.data() + 8);
    const std::uint32_t w = read_u32_be(bytes.data() + 12);
    if (h != 28 || w != 28) throw FormatError(path + ": expected 28x28 images");
    const std::size_t expected = 16 + static_cast<std::size_t>(n) * 784;
    if (bytes.size() != expected)
        throw FormatError(path + ": payload size " + std::to_string(bytes.size()) +
                          " does not match header (expected " + std::to_string(expected) + ")");

    Matrixf images(n, 784);
    const std::uint8_t* px = bytes.data() + 16;
    float* dst = images.data();
    const std::size_t count = static_cast<std::size_t>(n) * 784;
    for (std::size_t i = 0; i < count; ++i) dst[i] = static_cast<float>(px[i]) / 255.0f;
    return images;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_maybe_gzipped(path);
    if (bytes.size() < 8) throw FormatError(path + ": truncated IDX label header");
    if (read_u32_be(bytes.data()) != 0x00000801u)
        throw FormatError(path + ": bad IDX label magic");
    const std::uint32_t n = read_u32_be(bytes.data() + 4);
    if (bytes.size() != 8 + static_cast<std::size_t>(n))
        throw FormatError(path + ": label payload size does not match header");

    std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.end());
    for (const std::uint8_t y : labels)
        if (y > 9) throw FormatError(path + ": label value " + std::to_string(y) + " out of range");
    return labels;
}

Dataset load_mnist(const std::string& dir, bool train_split) {
    const std::string prefix = train_split ? "train" : "t10k";
    Dataset ds;
    ds.images = load_idx_images(resolve(dir, prefix + "-images-idx3-ubyte"));
    ds.labels = load_idx_labels(resolve(dir, prefix + "-labels-idx1-ubyte"));
    ds.validate();
    return ds;
}

} // namespace binfac
