#pragma once

#include <string>

#include "binfac/network.hpp"

namespace binfac {

// Versioned binary container, magic "BMF1", all fields little-endian:
//
//   "BMF1" | u32 version = 1 | u32 layer_count
//   per layer:
//     u8 kind            0 = dense, 1 = factorized
//     dense:       u32 n, u32 m           | f32 w[n*m] | f32 bias[n]
//     factorized:  u32 n, u32 m, u32 r, u8 phase (0 relaxed, 1 frozen)
//                  phase 0: f32 z[n*r]
//                  phase 1: u64 zwords[ceil(n*r/64)], bits LSB-first,
//                           pad bits zero
//                  | f32 a[r*m] | f32 bias[n]
//
// Matrices are row-major. Loading restores every parameter bit-exactly,
// so a reloaded network reproduces forward outputs bitwise. The file is
// written through a temporary and renamed, so failures leave no partial
// checkpoint behind.
void save_checkpoint(const Network<float>& net, const std::string& path);

Network<float> load_checkpoint(const std::string& path);

} // namespace binfac
