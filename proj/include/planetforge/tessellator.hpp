#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "planetforge/lodtree.hpp"
#include "planetforge/terrain.hpp"

namespace planetforge {

inline constexpr int kMaxInnerLevel = 6;

using Triangle = std::array<std::uint32_t, 3>;

struct PatchVertex {
  FacePoint param;      // on the patch's own face
  FacePoint canonical;  // ownership-canonical form, the weld key
  Vec3 world;
  Vec3 up;
  double elevation = 0.0;
  bool detailed = false;  // detail displacement applied
};

struct PatchMesh {
  QuadKey key;
  int inner_level = 0;
  std::array<int, 4> neighbor_levels{};
  std::vector<PatchVertex> vertices;
  std::vector<Triangle> triangles;  // counter-clockwise seen from outside
  // Vertex indices on each edge, ordered by increasing along-edge parameter.
  std::array<std::vector<std::uint32_t>, 4> boundary;
  // Edges that already received crack-repair midpoints.
  std::array<bool, 4> refined{};
};

// Regular 2^t x 2^t grid over the key's parameter square, two triangles per
// cell split along the (u0,v0)-(u1,v1) diagonal. Every vertex is placed from
// its canonical parameter, so shared boundary points agree bit for bit.
// Throws InvalidArgument if a neighbour level differs from key.level by > 1.
PatchMesh tessellate_patch(const QuadKey& key, const std::array<int, 4>& neighbor_levels,
                           int inner_level, const Terrain& terrain);
PatchMesh tessellate_patch(const QuadKey& key, const std::array<int, 4>& neighbor_levels,
                           int inner_level, const PlanetSpec& spec);

// Bisects every boundary triangle facing a one-level-finer neighbour through
// the midpoint of its boundary edge, so the patch carries every vertex the
// finer side generates along that edge.
PatchMesh fix_cracks(PatchMesh patch, const std::array<int, 4>& neighbor_levels,
                     const Terrain& terrain);
PatchMesh fix_cracks(PatchMesh patch, const std::array<int, 4>& neighbor_levels,
                     const PlanetSpec& spec);

// At active_level == max depth, displaces each vertex along its outward
// direction by tiled_detail(world, detail noise); coarser patches pass through.
PatchMesh apply_detail(PatchMesh patch, const Terrain& terrain, int active_level);
PatchMesh apply_detail(PatchMesh patch, const PlanetSpec& spec, int active_level);

// 2 * 4^t + (number of finer edges) * 2^t.
std::size_t expected_triangle_count(int inner_level, int finer_edges);

// Convenience: tessellate + fix_cracks + apply_detail for one active key.
PatchMesh build_patch(const ActiveKey& key, int inner_level, const Terrain& terrain);

struct IndexedMesh {
  Vec3 rebase_origin;
  std::vector<std::array<float, 3>> positions;  // world - rebase_origin
  std::vector<std::array<float, 3>> normals;
  std::vector<std::array<float, 3>> triplanar;
  std::vector<std::array<float, 3>> colors;  // linear RGB in [0, 1]
  std::vector<std::array<float, 3>> up;
  std::vector<Vec3> world;          // double-precision positions
  std::vector<double> elevation;    // height above the reference surface
  std::vector<FacePoint> weld_keys;
  std::vector<Triangle> triangles;

  std::size_t vertex_count() const { return world.size(); }
};

// Merges vertices by canonical parameter key. Instances of one key must agree
// bit for bit within the same detail state; when both states meet on a seam,
// the detailed instance wins. Output order depends only on the keys, never on
// patch order. Throws ConsistencyError on disagreeing instances.
IndexedMesh weld(std::span<const PatchMesh> patches, Vec3 rebase_origin);

// Area-weighted vertex normals from `world` and `triangles`.
void compute_normals(IndexedMesh& mesh);

// Sorts patches by key and tessellates the whole active set in parallel.
std::vector<PatchMesh> build_patches(const ActiveSet& set, int inner_level, const Terrain& terrain);

}  // namespace planetforge
