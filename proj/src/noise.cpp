#include "planetforge/noise.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "planetforge/error.hpp"
#include "planetforge/heightfield.hpp"

namespace planetforge {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Cube edge midpoints scaled to unit length.
constexpr std::array<Vec3, 12> kGradients{{
    {kInvSqrt2, kInvSqrt2, 0.0},  {-kInvSqrt2, kInvSqrt2, 0.0},
    {kInvSqrt2, -kInvSqrt2, 0.0}, {-kInvSqrt2, -kInvSqrt2, 0.0},
    {kInvSqrt2, 0.0, kInvSqrt2},  {-kInvSqrt2, 0.0, kInvSqrt2},
    {kInvSqrt2, 0.0, -kInvSqrt2}, {-kInvSqrt2, 0.0, -kInvSqrt2},
    {0.0, kInvSqrt2, kInvSqrt2},  {0.0, -kInvSqrt2, kInvSqrt2},
    {0.0, kInvSqrt2, -kInvSqrt2}, {0.0, -kInvSqrt2, -kInvSqrt2},
}};

// Peak magnitude of unit-gradient noise in three dimensions.
constexpr double kNoiseNormalizer = 0.86602540378443864676;  // sqrt(3) / 2

std::uint64_t lattice_hash(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t seed) {
  std::uint64_t h = mix64(seed ^ 0x632BE59BD9B4E019ULL);
  h = mix64(h ^ (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4FULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(z) * 0x165667B19E3779F9ULL));
  return h;
}

double corner_dot(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t seed, double dx,
                  double dy, double dz) {
  const Vec3& g = kGradients[(lattice_hash(x, y, z, seed) >> 32) % kGradients.size()];
  return g.x * dx + g.y * dy + g.z * dz;
}

constexpr double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
constexpr double lerp(double a, double b, double t) { return a + t * (b - a); }

// Uniform in [-0.5, 0.5) from 53 hash bits.
double centered_uniform(std::uint64_t seed, int step, int row, int col) {
  std::uint64_t h = mix64(seed ^ 0xA0761D6478BD642FULL);
  h = mix64(h ^ static_cast<std::uint64_t>(step));
  h = mix64(h ^ (static_cast<std::uint64_t>(row) << 32 | static_cast<std::uint32_t>(col)));
  return std::ldexp(static_cast<double>(h >> 11), -53) - 0.5;
}

}  // namespace

void NoiseSpec::validate() const {
  if (octaves < 1) throw InvalidArgument("noise.octaves must be >= 1");
  if (!(lacunarity > 1.0) || !std::isfinite(lacunarity))
    throw InvalidArgument("noise.lacunarity must be > 1");
  if (!(gain > 0.0 && gain <= 1.0)) throw InvalidArgument("noise.gain must be in (0, 1]");
  if (!(frequency > 0.0) || !std::isfinite(frequency))
    throw InvalidArgument("noise.frequency must be > 0");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw InvalidArgument("noise.amplitude must be >= 0");
}

double NoiseSpec::octave_bound() const {
  double sum = 0.0;
  double weight = 1.0;
  for (int i = 0; i < octaves; ++i) {
    sum += weight;
    weight *= gain;
  }
  return sum;
}

double perlin3(Vec3 p, std::uint64_t seed) {
  if (!is_finite(p)) throw InvalidArgument("perlin3: non-finite input coordinate");

  const double fx = std::floor(p.x);
  const double fy = std::floor(p.y);
  const double fz = std::floor(p.z);
  const auto x0 = static_cast<std::int64_t>(fx);
  const auto y0 = static_cast<std::int64_t>(fy);
  const auto z0 = static_cast<std::int64_t>(fz);
  const double dx = p.x - fx;
  const double dy = p.y - fy;
  const double dz = p.z - fz;

  const double n000 = corner_dot(x0, y0, z0, seed, dx, dy, dz);
  const double n100 = corner_dot(x0 + 1, y0, z0, seed, dx - 1.0, dy, dz);
  const double n010 = corner_dot(x0, y0 + 1, z0, seed, dx, dy - 1.0, dz);
  const double n110 = corner_dot(x0 + 1, y0 + 1, z0, seed, dx - 1.0, dy - 1.0, dz);
  const double n001 = corner_dot(x0, y0, z0 + 1, seed, dx, dy, dz - 1.0);
  const double n101 = corner_dot(x0 + 1, y0, z0 + 1, seed, dx - 1.0, dy, dz - 1.0);
  const double n011 = corner_dot(x0, y0 + 1, z0 + 1, seed, dx, dy - 1.0, dz - 1.0);
  const double n111 = corner_dot(x0 + 1, y0 + 1, z0 + 1, seed, dx - 1.0, dy - 1.0, dz - 1.0);

  const double u = fade(dx);
  const double v = fade(dy);
  const double w = fade(dz);
  const double raw = lerp(lerp(lerp(n000, n100, u), lerp(n010, n110, u), v),
                          lerp(lerp(n001, n101, u), lerp(n011, n111, u), v), w);
  return std::clamp(raw / kNoiseNormalizer, -1.0, 1.0);
}

double fbm3(Vec3 p, const NoiseSpec& spec) {
  spec.validate();
  double sum = 0.0;
  double weight = 1.0;
  double freq = spec.frequency;
  for (int i = 0; i < spec.octaves; ++i) {
    sum += weight * perlin3(p * freq, octave_seed(spec.seed, i));
    weight *= spec.gain;
    freq *= spec.lacunarity;
  }
  return sum;
}

double tiled_detail(Vec3 p_world, const NoiseSpec& spec) {
  spec.validate();
  if (spec.amplitude == 0.0) return 0.0;
  return spec.amplitude * fbm3(p_world, spec);
}

HeightField diamond_square(int size_exponent, const CornerValues& corners, double roughness,
                           std::uint64_t seed) {
  if (size_exponent < 1 || size_exponent > 12)
    throw InvalidArgument("diamond_square: size_exponent must be in [1, 12]");
  if (!(roughness >= 0.0) || !std::isfinite(roughness))
    throw InvalidArgument("diamond_square: roughness must be >= 0");
  for (double c : corners)
    if (!std::isfinite(c)) throw InvalidArgument("diamond_square: corner values must be finite");

  const int n = 1 << size_exponent;
  const int side = n + 1;
  std::vector<double> cells(static_cast<std::size_t>(side) * side, 0.0);
  auto at = [&](int r, int c) -> double& { return cells[static_cast<std::size_t>(r) * side + c]; };

  at(0, 0) = corners[0];
  at(0, n) = corners[1];
  at(n, 0) = corners[2];
  at(n, n) = corners[3];

  for (int step = 1, half = n / 2; half >= 1; ++step, half /= 2) {
    const double scale = std::ldexp(roughness, -step);
    const int full = half * 2;

    // Diamond: centres of squares.
    for (int r = half; r < n; r += full) {
      for (int c = half; c < n; c += full) {
        const double avg =
            (at(r - half, c - half) + at(r - half, c + half) + at(r + half, c - half) +
             at(r + half, c + half)) / 4.0;
        at(r, c) = avg + scale * centered_uniform(seed, step, r, c);
      }
    }

    // Square: edge midpoints.
    for (int r = 0; r <= n; r += half) {
      for (int c = (r / half) % 2 == 0 ? half : 0; c <= n; c += full) {
        double avg;
        if (r == 0 || r == n) {
          avg = (at(r, c - half) + at(r, c + half)) / 2.0;
        } else if (c == 0 || c == n) {
          avg = (at(r - half, c) + at(r + half, c)) / 2.0;
        } else {
          avg = (at(r - half, c) + at(r + half, c) + at(r, c - half) + at(r, c + half)) / 4.0;
        }
        at(r, c) = avg + scale * centered_uniform(seed, step, r, c);
      }
    }
  }

  return HeightField(side, side, std::move(cells));
}

}  // namespace planetforge
