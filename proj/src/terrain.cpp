#include "planetforge/terrain.hpp"

#include <algorithm>
#include <cmath>

#include "planetforge/error.hpp"

namespace planetforge {

PlanetTerrain::PlanetTerrain(PlanetSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double PlanetTerrain::relief_bound() const {
  return spec_.elevation_bound() + spec_.detail_bound();
}

Vec3 PlanetTerrain::base_point(const FacePoint& p) const {
  return apply_oblateness(face_to_unit_sphere(p) * spec_.base_radius, spec_);
}

SurfaceSample PlanetTerrain::sample(const FacePoint& p) const {
  const Vec3 d = face_to_unit_sphere(p);
  const double e = planet_elevation(d, spec_);
  return {apply_oblateness(d * (spec_.base_radius + e), spec_), d, e};
}

void FlatSpec::validate() const {
  if (!(extent > 0.0) || !std::isfinite(extent)) throw InvalidArgument("flat.extent must be > 0");
  if (max_depth < 0 || max_depth > 24) throw InvalidArgument("flat.max_depth must be in [0, 24]");
  elevation_noise.validate();
  detail_noise.validate();
}

FlatTerrain::FlatTerrain(FlatSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.heightfield) {
    const auto [lo, hi] = spec_.heightfield->range();
    relief_ = std::max(std::abs(lo), std::abs(hi)) * spec_.heightfield->vertical_scale();
  } else {
    relief_ = spec_.elevation_noise.amplitude * spec_.elevation_noise.octave_bound();
  }
  relief_ += spec_.detail_noise.amplitude * spec_.detail_noise.octave_bound();
}

Vec3 FlatTerrain::base_point(const FacePoint& p) const {
  const FaceCoord c = to_face_coord(p);
  return {c.u * spec_.extent, c.v * spec_.extent, 0.0};
}

SurfaceSample FlatTerrain::sample(const FacePoint& p) const {
  const Vec3 base = base_point(p);
  double e = 0.0;
  if (spec_.heightfield) {
    const FaceCoord c = to_face_coord(p);
    // Heightfield rows run top to bottom; v runs bottom to top.
    e = sample_bilinear(*spec_.heightfield, c.u, 1.0 - c.v) * spec_.heightfield->vertical_scale();
  } else if (spec_.elevation_noise.amplitude != 0.0) {
    e = spec_.elevation_noise.amplitude * fbm3(base, spec_.elevation_noise);
  }
  return {{base.x, base.y, e}, {0.0, 0.0, 1.0}, e};
}

}  // namespace planetforge
