#pragma once

#include <cstdint>

namespace cascade::rng {

// Counter-based generator: every tree node owns a 64-bit state that is a pure
// function of (seed, digit path), so draws do not depend on traversal order or
// thread scheduling.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// State of the root node (empty word).
constexpr std::uint64_t root_state(std::uint64_t seed) { return splitmix64(seed); }

// State of the d-th child. Digits are offset by 1 so the path hash is
// prefix-free against the atom salt below.
constexpr std::uint64_t child_state(std::uint64_t state, unsigned digit) {
  return splitmix64(state ^ (static_cast<std::uint64_t>(digit) + 1));
}

inline constexpr std::uint64_t kAtomSalt = 0xA5C867F3B1D40E95ull;

// Hash used for the node's own atom draw; kept distinct from child derivation.
constexpr std::uint64_t atom_state(std::uint64_t state) { return splitmix64(state ^ kAtomSalt); }

// Uniform in [0,1) from the high 53 bits.
constexpr double unit01(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Seed splitting for sweeps: stream `index` of a master seed.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x9E3779B97F4A7C15ull));
}

}  // namespace cascade::rng
