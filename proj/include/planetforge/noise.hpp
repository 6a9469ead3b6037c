#pragma once

#include <array>
#include <cstdint>

#include "planetforge/vec3.hpp"

namespace planetforge {

class HeightField;

// Parameters of a seeded fractal (fBm) noise layer.
struct NoiseSpec {
  std::uint64_t seed = 0;
  int octaves = 6;
  double lacunarity = 2.0;  // frequency multiplier per octave
  double gain = 0.5;        // amplitude multiplier per octave
  double frequency = 1.0;   // cycles per world unit
  double amplitude = 1.0;   // world units of peak displacement

  // Throws InvalidArgument when a field is out of range.
  void validate() const;

  // Sum of gain^i over all octaves, accumulated in the same order fbm3 uses,
  // so |fbm3(p, *this)| <= octave_bound() holds exactly in floating point.
  double octave_bound() const;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// 64-bit avalanche mix (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Seed used for octave `index` of an fBm sum. Octave 0 keeps the base seed.
constexpr std::uint64_t octave_seed(std::uint64_t seed, int index) {
  return seed ^ (static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL);
}

// Gradient noise in [-1, 1]. Zero at every integer lattice point.
double perlin3(Vec3 p, std::uint64_t seed);

// Unscaled fractal sum of perlin3 octaves (amplitude is not applied).
double fbm3(Vec3 p, const NoiseSpec& spec);

// Signed world-space displacement amplitude * fbm3(p_world). Depends only on
// the world point, so patches sharing a point always agree.
double tiled_detail(Vec3 p_world, const NoiseSpec& spec);

// Corner order: (row 0, col 0), (row 0, col N), (row N, col 0), (row N, col N).
using CornerValues = std::array<double, 4>;

// Diamond-square heightfield of (2^n + 1)^2 cells, 1 <= n <= 12.
// Step s (1-based, coarsest first) perturbs every new midpoint by a uniform
// offset in [-0.5, 0.5) * roughness * 2^-s, drawn from a counter-based
// generator keyed on (seed, s, row, col). Edge midpoints on the outer border
// average their two collinear neighbours; all other points average four.
HeightField diamond_square(int size_exponent, const CornerValues& corners, double roughness,
                           std::uint64_t seed);

}  // namespace planetforge
