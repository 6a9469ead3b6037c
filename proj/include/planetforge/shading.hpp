#pragma once

#include <array>
#include <utility>
#include <vector>

#include "planetforge/tessellator.hpp"
#include "planetforge/terrain.hpp"

namespace planetforge {

using Rgb = std::array<double, 3>;

struct RampKnot {
  double at = 0.0;  // normalized elevation in [0, 1]
  Rgb color{1.0, 1.0, 1.0};

  friend bool operator==(const RampKnot&, const RampKnot&) = default;
};

// Piecewise-linear elevation colors plus a slope override.
struct ColorRamp {
  std::vector<RampKnot> knots{{0.0, {0.15, 0.35, 0.15}}, {1.0, {0.95, 0.95, 0.95}}};
  // Cosine of the angle between the normal and the outward direction below
  // which a vertex is painted rock_color.
  double slope_rock_threshold = 0.0;
  Rgb rock_color{0.45, 0.42, 0.40};

  // A single knot is a constant ramp. Otherwise knots must be strictly
  // increasing, start at 0 and end at 1.
  void validate() const;
  Rgb color_at(double fraction) const;

  friend bool operator==(const ColorRamp&, const ColorRamp&) = default;
};

struct ShadingParams {
  double ambient_floor = 0.05;
  double sharpness = 4.0;  // triplanar blend exponent
  // Elevation mapped to ramp fraction 0 and 1. When lo == hi the terrain's
  // relief bound is used: [-relief, +relief].
  std::pair<double, double> elevation_range{0.0, 0.0};

  void validate() const;
};

// w_i = |n_i|^s / sum_j |n_j|^s. Throws InvalidArgument when |n| is not 1.
std::array<double, 3> triplanar_weights(Vec3 normal, double sharpness);

// Bakes ramp color x max(dot(n, -light_dir), ambient_floor) into vertex
// colors and fills triplanar weights. Colors are recomputed from geometry
// only, so shading twice gives the same result.
IndexedMesh shade_vertices(IndexedMesh mesh, const ColorRamp& ramp, Vec3 light_dir,
                           const Terrain& terrain, const ShadingParams& params = {});
IndexedMesh shade_vertices(IndexedMesh mesh, const ColorRamp& ramp, Vec3 light_dir,
                           const PlanetSpec& spec, const ShadingParams& params = {});

}  // namespace planetforge
