// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace speccount::detail {

// Counter-based generator: every draw is a pure function of (seed, stream,
// index), so vectors can be produced in any order, on any thread, with
// identical bits. The mixer is the splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t cell(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = mix64(seed ^ 0x8e9c0a5e1f3b72d5ULL);
  h = mix64(h ^ (stream + 0x632be59bd9b4e019ULL));
  return mix64(h ^ (index + 0xd1b54a32d192ed03ULL));
}

// Uniform in [0, 1); 53 mantissa bits.
inline double u01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe as a log argument.
inline double u01_open(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; entry i consumes counter cells 2i, 2i+1.
inline double gauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
  const double u1 = u01_open(cell(seed, stream, 2 * i));
  const double u2 = u01(cell(seed, stream, 2 * i + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double rademacher(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
  return (cell(seed, stream, i) >> 63) ? 1.0 : -1.0;
}

}  // namespace speccount::detail
