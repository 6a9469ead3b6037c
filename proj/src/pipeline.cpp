#include "planetforge/pipeline.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>

#include "planetforge/error.hpp"
#include "planetforge/heightfield.hpp"

namespace planetforge {
namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

nlohmann::ordered_json FrameStats::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["frame"] = frame;
  j["camera"] = {camera_position.x, camera_position.y, camera_position.z};
  j["active_keys"] = active_keys;
  j["level_histogram"] = level_histogram;
  j["triangles"] = triangles;
  j["vertices"] = vertices;
  if (include_timing) j["timing_ms"] = {{"selection", selection_ms}, {"tessellation", tessellation_ms}};
  return j;
}

bool in_view_cone(const NodeBound& bound, const CameraState& camera, double vertical_fov,
                  double aspect_ratio) {
  const Vec3 to_center = bound.center - camera.position;
  const double dist = length(to_center);
  if (dist <= bound.radius) return true;
  const double half_diag = std::atan(std::tan(vertical_fov / 2.0) * std::sqrt(1.0 + aspect_ratio * aspect_ratio));
  const double angle = std::acos(std::clamp(dot(to_center / dist, normalize(camera.forward)), -1.0, 1.0));
  return angle <= half_diag + std::asin(bound.radius / dist);
}

Frame build_frame(const CameraState& camera, const Terrain& terrain, const LodConfig& lod,
                  const FrameOptions& options, std::size_t frame_index) {
  Frame frame;
  auto t0 = std::chrono::steady_clock::now();
  frame.active = select_lod(camera, terrain, lod);
  frame.stats.selection_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<PatchMesh> patches = build_patches(frame.active, options.inner_level, terrain);
  if (options.frustum_cull) {
    std::erase_if(patches, [&](const PatchMesh& p) {
      return !in_view_cone(node_bound(p.key, terrain), camera, lod.vertical_fov, options.aspect_ratio);
    });
  }
  const Vec3 origin = options.rebase_to_camera ? camera.position : Vec3{};
  frame.mesh = weld(patches, origin);
  if (options.shade)
    frame.mesh = shade_vertices(std::move(frame.mesh), options.ramp, options.light_dir, terrain, options.shading);
  frame.stats.tessellation_ms = elapsed_ms(t0);

  frame.stats.frame = frame_index;
  frame.stats.camera_position = camera.position;
  frame.stats.active_keys = frame.active.size();
  frame.stats.level_histogram = frame.active.level_histogram();
  frame.stats.triangles = frame.mesh.triangles.size();
  frame.stats.vertices = frame.mesh.vertex_count();
  return frame;
}

std::unique_ptr<Terrain> make_terrain(const RunConfig& cfg) {
  if (cfg.terrain == TerrainKind::Planet) return std::make_unique<PlanetTerrain>(cfg.planet);
  FlatSpec spec;
  spec.extent = cfg.flat.extent;
  spec.max_depth = cfg.flat.max_depth;
  spec.elevation_noise = cfg.flat.elevation_noise;
  spec.detail_noise = cfg.flat.detail_noise;
  if (cfg.flat.heightmap) spec.heightfield = import_heightfield(*cfg.flat.heightmap);
  return std::make_unique<FlatTerrain>(std::move(spec));
}

FrameOptions frame_options(const RunConfig& cfg) {
  FrameOptions o;
  o.inner_level = cfg.inner_level;
  o.frustum_cull = cfg.export_options.frustum_cull;
  o.aspect_ratio = cfg.export_options.aspect_ratio;
  o.rebase_to_camera = cfg.export_options.rebase_to_camera;
  o.ramp = cfg.shading.ramp;
  o.light_dir = cfg.shading.light_dir;
  o.shading = cfg.shading.params;
  return o;
}

CameraState default_camera(const RunConfig& cfg) {
  if (cfg.camera) return *cfg.camera;
  if (cfg.terrain == TerrainKind::Flat) {
    const double e = cfg.flat.extent;
    return CameraState::looking_at_origin({0.5 * e, 0.5 * e, e});
  }
  return CameraState::looking_at_origin({0.0, 0.0, 3.0 * cfg.planet.base_radius});
}

}  // namespace planetforge
