#pragma once

#include <cstdint>
#include <string_view>

namespace hymem {

// FNV-1a, 64-bit. Stable across platforms and process runs.
constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL) {
  uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64 finalizer; used as a tiny counter-mode generator.
constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [-1, 1) from a 64-bit word.
constexpr double to_unit_interval(uint64_t word) {
  return static_cast<double>(word >> 11) * (1.0 / 4503599627370496.0) * 2.0 - 1.0;
}

}  // namespace hymem
