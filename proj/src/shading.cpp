#include "planetforge/shading.hpp"

#include <algorithm>
#include <cmath>

#include "planetforge/error.hpp"
#include "planetforge/parallel.hpp"

namespace planetforge {

void ColorRamp::validate() const {
  if (knots.empty()) throw InvalidArgument("ramp: needs at least one knot");
  auto check_color = [](const Rgb& c) {
    for (double x : c)
      if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("ramp: colors must be in [0, 1]");
  };
  for (const auto& k : knots) {
    if (!(k.at >= 0.0 && k.at <= 1.0)) throw InvalidArgument("ramp: knot positions must be in [0, 1]");
    check_color(k.color);
  }
  check_color(rock_color);
  if (!(slope_rock_threshold >= 0.0 && slope_rock_threshold <= 1.0))
    throw InvalidArgument("ramp: slope_rock_threshold must be in [0, 1]");
  if (knots.size() == 1) return;
  if (knots.front().at != 0.0 || knots.back().at != 1.0)
    throw InvalidArgument("ramp: first knot must be at 0 and last at 1");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].at > knots[i - 1].at)) throw InvalidArgument("ramp: knots must be strictly increasing");
}

Rgb ColorRamp::color_at(double fraction) const {
  if (knots.size() == 1) return knots.front().color;
  const double f = std::clamp(fraction, 0.0, 1.0);
  auto hi = std::lower_bound(knots.begin(), knots.end(), f,
                             [](const RampKnot& k, double x) { return k.at < x; });
  if (hi->at == f) return hi->color;
  const auto lo = hi - 1;
  const double t = (f - lo->at) / (hi->at - lo->at);
  Rgb out;
  for (int c = 0; c < 3; ++c) out[c] = lo->color[c] + t * (hi->color[c] - lo->color[c]);
  return out;
}

void ShadingParams::validate() const {
  if (!(ambient_floor >= 0.0 && ambient_floor <= 1.0))
    throw InvalidArgument("shading.ambient_floor must be in [0, 1]");
  if (!(sharpness >= 1.0) || !std::isfinite(sharpness))
    throw InvalidArgument("shading.sharpness must be >= 1");
  if (!(elevation_range.first <= elevation_range.second))
    throw InvalidArgument("shading.elevation_range must be ordered");
}

std::array<double, 3> triplanar_weights(Vec3 normal, double sharpness) {
  if (!(sharpness >= 1.0) || !std::isfinite(sharpness))
    throw InvalidArgument("triplanar_weights: sharpness must be >= 1");
  if (!is_finite(normal) || std::abs(length(normal) - 1.0) > 1e-6)
    throw InvalidArgument("triplanar_weights: normal must be unit length");
  const std::array<double, 3> p{std::pow(std::abs(normal.x), sharpness),
                                std::pow(std::abs(normal.y), sharpness),
                                std::pow(std::abs(normal.z), sharpness)};
  const double sum = p[0] + p[1] + p[2];
  return {p[0] / sum, p[1] / sum, p[2] / sum};
}

IndexedMesh shade_vertices(IndexedMesh mesh, const ColorRamp& ramp, Vec3 light_dir,
                           const Terrain& terrain, const ShadingParams& params) {
  ramp.validate();
  params.validate();
  if (!is_finite(light_dir) || length(light_dir) == 0.0)
    throw InvalidArgument("shade_vertices: light direction must be non-zero");
  if (mesh.normals.size() != mesh.vertex_count() || mesh.up.size() != mesh.vertex_count())
    throw InvalidArgument("shade_vertices: mesh has no normals");
  const Vec3 to_light = -normalize(light_dir);

  auto [lo, hi] = params.elevation_range;
  if (lo == hi) {
    const double relief = terrain.relief_bound();
    lo = -relief;
    hi = relief;
  }
  const double span = hi - lo;

  const std::size_t n = mesh.vertex_count();
  mesh.colors.resize(n);
  mesh.triplanar.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& nf = mesh.normals[i];
    const Vec3 normal = normalize(Vec3{nf[0], nf[1], nf[2]});
    const Vec3 up{mesh.up[i][0], mesh.up[i][1], mesh.up[i][2]};

    const double fraction = span > 0.0 ? (mesh.elevation[i] - lo) / span : 0.5;
    Rgb base = ramp.color_at(fraction);
    if (dot(normal, normalize(up)) < ramp.slope_rock_threshold) base = ramp.rock_color;

    const double light = std::max(dot(normal, to_light), params.ambient_floor);
    for (int c = 0; c < 3; ++c) mesh.colors[i][c] = static_cast<float>(std::clamp(base[c] * light, 0.0, 1.0));

    const auto w = triplanar_weights(normal, params.sharpness);
    mesh.triplanar[i] = {static_cast<float>(w[0]), static_cast<float>(w[1]), static_cast<float>(w[2])};
  });
  return mesh;
}

IndexedMesh shade_vertices(IndexedMesh mesh, const ColorRamp& ramp, Vec3 light_dir,
                           const PlanetSpec& spec, const ShadingParams& params) {
  return shade_vertices(std::move(mesh), ramp, light_dir, PlanetTerrain(spec), params);
}

}  // namespace planetforge
