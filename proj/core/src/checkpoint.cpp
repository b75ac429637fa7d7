#include "binfac/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace binfac {

namespace {

constexpr char kMagic[4] = {'B', 'M', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::vector<std::uint8_t> bytes;

    void u8(std::uint8_t v) { bytes.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f32_array(const float* data, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) f32(data[i]);
    }
};

struct Reader {
    const std::uint8_t* p;
    std::size_t remaining;
    std::string path;

    void need(std::size_t n) const {
        if (remaining < n) throw FormatError(path + ": truncated checkpoint");
    }
    std::uint8_t u8() {
        need(1);
        const std::uint8_t v = *p;
        ++p;
        --remaining;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
        p += 4;
        remaining -= 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
        p += 8;
        remaining -= 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
};

void check_finite(const float* data, std::size_t count, const std::string& path) {
    for (std::size_t i = 0; i < count; ++i)
        if (!std::isfinite(data[i])) throw FormatError(path + ": non-finite parameter value");
}

} // namespace

void save_checkpoint(const Network<float>& net, const std::string& path) {
    Writer w;
    w.bytes.insert(w.bytes.end(), kMagic, kMagic + 4);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(net.layers.size()));

    for (const LayerState<float>& layer : net.layers) {
        if (const auto* dense = std::get_if<DenseLayer<float>>(&layer)) {
            w.u8(0);
            w.u32(static_cast<std::uint32_t>(dense->w.rows()));
            w.u32(static_cast<std::uint32_t>(dense->w.cols()));
            w.f32_array(dense->w.data(), dense->w.size());
            w.f32_array(dense->bias.data(), dense->bias.size());
        } else {
            const auto& fac = std::get<FactorizedLayer<float>>(layer);
            w.u8(1);
            w.u32(static_cast<std::uint32_t>(fac.z.rows()));
            w.u32(static_cast<std::uint32_t>(fac.a.cols()));
            w.u32(static_cast<std::uint32_t>(fac.z.cols()));
            w.u8(net.phase == TrainPhase::FrozenBinary ? 1 : 0);
            if (net.phase == TrainPhase::FrozenBinary) {
                const SignMatrix packed = SignMatrix::pack(fac.z, SignConvention::ZeroOne);
                for (const std::uint64_t word : packed.words()) w.u64(word);
            } else {
                w.f32_array(fac.z.data(), fac.z.size());
            }
            w.f32_array(fac.a.data(), fac.a.size());
            w.f32_array(fac.bias.data(), fac.bias.size());
        }
    }

    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp);
        f.write(reinterpret_cast<const char*>(w.bytes.data()),
                static_cast<std::streamsize>(w.bytes.size()));
        if (!f) throw IoError("write failure on " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move checkpoint into place at " + path);
    }
}

Network<float> load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failure on " + path);

    Reader r{bytes.data(), bytes.size(), path};
    r.need(4);
    if (std::memcmp(r.p, kMagic, 4) != 0) throw FormatError(path + ": bad checkpoint magic");
    r.p += 4;
    r.remaining -= 4;
    if (r.u32() != kVersion) throw FormatError(path + ": unsupported checkpoint version");
    const std::uint32_t layer_count = r.u32();

    Network<float> net;
    std::vector<std::size_t> dims;
    std::vector<bool> mask;
    std::vector<std::size_t> ranks;
    int phase_seen = -1; // factorized layers must agree on phase

    for (std::uint32_t l = 0; l < layer_count; ++l) {
        const std::uint8_t kind = r.u8();
        if (kind > 1) throw FormatError(path + ": unknown layer kind");
        const std::size_t n = r.u32();
        const std::size_t m = r.u32();
        if (n == 0 || m == 0) throw FormatError(path + ": zero layer dimension");
        if (dims.empty())
            dims.push_back(m);
        else if (dims.back() != m)
            throw FormatError(path + ": layer dimensions do not chain");
        dims.push_back(n);

        if (kind == 0) {
            mask.push_back(false);
            ranks.push_back(0);
            DenseLayer<float> layer;
            layer.w = Matrixf(n, m);
            for (std::size_t i = 0; i < n * m; ++i) layer.w.data()[i] = r.f32();
            layer.bias.resize(n);
            for (std::size_t i = 0; i < n; ++i) layer.bias[i] = r.f32();
            check_finite(layer.w.data(), layer.w.size(), path);
            check_finite(layer.bias.data(), layer.bias.size(), path);
            net.layers.emplace_back(std::move(layer));
        } else {
            const std::size_t rank = r.u32();
            if (rank == 0 || rank > n) throw FormatError(path + ": invalid inner dimension");
            const std::uint8_t phase = r.u8();
            if (phase > 1) throw FormatError(path + ": unknown phase tag");
            if (phase_seen == -1)
                phase_seen = phase;
            else if (phase_seen != phase)
                throw FormatError(path + ": inconsistent phases across layers");

            mask.push_back(true);
            ranks.push_back(rank);
            FactorizedLayer<float> layer;
            layer.z = Matrixf(n, rank);
            if (phase == 1) {
                const std::size_t words = (n * rank + 63) / 64;
                std::size_t e = 0;
                for (std::size_t wi = 0; wi < words; ++wi) {
                    const std::uint64_t word = r.u64();
                    for (int b = 0; b < 64 && e < n * rank; ++b, ++e)
                        layer.z.data()[e] = (word >> b) & 1u ? 1.0f : 0.0f;
                    // pad bits must be zero for the stored words to be
                    // comparable across writers
                    if (wi + 1 == words && (n * rank) % 64 != 0 &&
                        (word >> ((n * rank) % 64)) != 0)
                        throw FormatError(path + ": nonzero pad bits in packed sign data");
                }
            } else {
                for (std::size_t i = 0; i < n * rank; ++i) layer.z.data()[i] = r.f32();
                check_finite(layer.z.data(), layer.z.size(), path);
            }
            layer.a = Matrixf(rank, m);
            for (std::size_t i = 0; i < rank * m; ++i) layer.a.data()[i] = r.f32();
            layer.bias.resize(n);
            for (std::size_t i = 0; i < n; ++i) layer.bias[i] = r.f32();
            check_finite(layer.a.data(), layer.a.size(), path);
            check_finite(layer.bias.data(), layer.bias.size(), path);
            net.layers.emplace_back(std::move(layer));
        }
    }
    if (r.remaining != 0) throw FormatError(path + ": trailing bytes after last layer");
    if (dims.empty()) throw FormatError(path + ": checkpoint holds no layers");

    net.spec.layer_dims = std::move(dims);
    net.spec.factorize_mask = std::move(mask);
    net.spec.inner_ranks = std::move(ranks);
    net.phase = phase_seen == 1 ? TrainPhase::FrozenBinary : TrainPhase::Relaxed;
    net.spec.validate();
    return net;
}

} // namespace binfac
