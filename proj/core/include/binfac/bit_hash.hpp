#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace binfac {

// SHA-256 of a byte span (OpenSSL-backed).
std::array<std::uint8_t, 32> sha256_digest(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

inline std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    const auto digest = sha256_digest(bytes);
    return to_hex(digest);
}

} // namespace binfac
