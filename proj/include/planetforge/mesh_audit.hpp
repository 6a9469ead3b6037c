#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "planetforge/tessellator.hpp"
#include "planetforge/vec3.hpp"

namespace planetforge {

using EdgeRef = std::pair<std::uint32_t, std::uint32_t>;

// A vertex lying strictly inside an open (boundary) edge.
struct TJunction {
  std::uint32_t vertex;
  EdgeRef edge;
};

struct AuditOptions {
  // A vertex counts as on a segment when its distance is at most
  // tolerance * segment_length (relative) or tolerance (absolute).
  double tjunction_tolerance = 1e-6;
  bool relative_tolerance = true;
};

struct MeshAudit {
  std::size_t vertex_count = 0;  // referenced by at least one triangle
  std::size_t edge_count = 0;
  std::size_t face_count = 0;
  long long euler = 0;  // V - E + F
  std::vector<EdgeRef> boundary_edges;      // one incident triangle
  std::vector<EdgeRef> nonmanifold_edges;   // three or more incident triangles
  std::size_t orientation_conflicts = 0;    // directed edge used twice
  std::size_t degenerate_triangles = 0;     // repeated index or zero area
  std::size_t duplicate_vertices = 0;       // distinct indices, equal positions
  std::vector<TJunction> tjunctions;

  // Every edge shared by exactly two consistently oriented triangles and
  // V - E + F = 2.
  bool watertight() const;
  // Passing audit: no T-junctions, no degenerate or duplicate geometry, no
  // non-manifold edges, plus watertight() when a closed surface is expected.
  bool passes(bool expect_closed) const;

  nlohmann::json to_json(bool expect_closed, std::size_t max_listed = 64) const;
};

MeshAudit audit_mesh(std::span<const Vec3> positions, std::span<const Triangle> triangles,
                     const AuditOptions& options = {});

MeshAudit audit_mesh(const IndexedMesh& mesh, const AuditOptions& options = {});

}  // namespace planetforge
