#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "planetforge/config.hpp"
#include "planetforge/lodtree.hpp"
#include "planetforge/mesh_audit.hpp"
#include "planetforge/shading.hpp"
#include "planetforge/tessellator.hpp"

namespace planetforge {

struct FrameStats {
  std::size_t frame = 0;
  Vec3 camera_position;
  std::size_t active_keys = 0;
  std::vector<std::size_t> level_histogram;
  std::size_t triangles = 0;
  std::size_t vertices = 0;
  double selection_ms = 0.0;
  double tessellation_ms = 0.0;

  nlohmann::ordered_json to_json(bool include_timing = true) const;
};

struct FrameOptions {
  int inner_level = 4;
  bool frustum_cull = false;
  double aspect_ratio = 16.0 / 9.0;
  bool rebase_to_camera = true;
  bool shade = true;
  ColorRamp ramp{};
  Vec3 light_dir{-1.0, -0.3, -0.2};
  ShadingParams shading{};
};

struct Frame {
  ActiveSet active;
  IndexedMesh mesh;
  FrameStats stats;
};

// True when the node's bounding sphere intersects the camera's view cone.
bool in_view_cone(const NodeBound& bound, const CameraState& camera, double vertical_fov,
                  double aspect_ratio);

// select_lod -> tessellate_patch -> fix_cracks -> apply_detail -> weld -> shade.
Frame build_frame(const CameraState& camera, const Terrain& terrain, const LodConfig& lod,
                  const FrameOptions& options, std::size_t frame_index = 0);

std::unique_ptr<Terrain> make_terrain(const RunConfig& cfg);
FrameOptions frame_options(const RunConfig& cfg);

// Default camera for a config: the configured one, or 3 scales out on +Z.
CameraState default_camera(const RunConfig& cfg);

}  // namespace planetforge
