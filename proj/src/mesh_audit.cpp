#include "planetforge/mesh_audit.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>

namespace planetforge {
namespace {

EdgeRef undirected(std::uint32_t a, std::uint32_t b) { return a < b ? EdgeRef{a, b} : EdgeRef{b, a}; }

// True when p lies strictly between a and b within the tolerance.
bool strictly_inside(Vec3 p, Vec3 a, Vec3 b, const AuditOptions& opt) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return false;
  const double t = dot(p - a, ab) / len2;
  const double len = std::sqrt(len2);
  const double tol = opt.relative_tolerance ? opt.tjunction_tolerance * len : opt.tjunction_tolerance;
  const double t_margin = tol / len;
  if (t <= t_margin || t >= 1.0 - t_margin) return false;
  return length(p - (a + ab * t)) <= tol;
}

}  // namespace

bool MeshAudit::watertight() const {
  return boundary_edges.empty() && nonmanifold_edges.empty() && orientation_conflicts == 0 &&
         euler == 2;
}

bool MeshAudit::passes(bool expect_closed) const {
  if (!tjunctions.empty() || degenerate_triangles != 0 || duplicate_vertices != 0 ||
      !nonmanifold_edges.empty() || orientation_conflicts != 0)
    return false;
  return !expect_closed || watertight();
}

nlohmann::json MeshAudit::to_json(bool expect_closed, std::size_t max_listed) const {
  auto edges = [&](const std::vector<EdgeRef>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < std::min(list.size(), max_listed); ++i)
      arr.push_back({list[i].first, list[i].second});
    return arr;
  };
  nlohmann::json tj = nlohmann::json::array();
  for (std::size_t i = 0; i < std::min(tjunctions.size(), max_listed); ++i)
    tj.push_back({{"vertex", tjunctions[i].vertex},
                  {"edge", {tjunctions[i].edge.first, tjunctions[i].edge.second}}});

  nlohmann::ordered_json j;
  j["pass"] = passes(expect_closed);
  j["expect_closed"] = expect_closed;
  j["watertight"] = watertight();
  j["vertices"] = vertex_count;
  j["edges"] = edge_count;
  j["faces"] = face_count;
  j["euler"] = euler;
  j["boundary_edge_count"] = boundary_edges.size();
  j["boundary_edges"] = edges(boundary_edges);
  j["nonmanifold_edge_count"] = nonmanifold_edges.size();
  j["nonmanifold_edges"] = edges(nonmanifold_edges);
  j["orientation_conflicts"] = orientation_conflicts;
  j["degenerate_triangles"] = degenerate_triangles;
  j["duplicate_vertices"] = duplicate_vertices;
  j["tjunction_count"] = tjunctions.size();
  j["tjunctions"] = tj;
  return j;
}

MeshAudit audit_mesh(std::span<const Vec3> positions, std::span<const Triangle> triangles,
                     const AuditOptions& options) {
  MeshAudit audit;
  audit.face_count = triangles.size();

  std::vector<bool> referenced(positions.size(), false);
  std::unordered_map<std::uint64_t, std::uint32_t> directed_uses;
  std::unordered_map<std::uint64_t, std::uint32_t> incidence;
  directed_uses.reserve(triangles.size() * 3);
  incidence.reserve(triangles.size() * 2);
  for (const Triangle& t : triangles) {
    for (std::uint32_t idx : t) {
      if (idx >= positions.size()) {
        ++audit.degenerate_triangles;
        continue;
      }
      referenced[idx] = true;
    }
    if (t[0] >= positions.size() || t[1] >= positions.size() || t[2] >= positions.size()) continue;
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      ++audit.degenerate_triangles;
    } else {
      const Vec3 a = positions[t[0]];
      if (length(cross(positions[t[1]] - a, positions[t[2]] - a)) == 0.0) ++audit.degenerate_triangles;
    }
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = t[k];
      const std::uint32_t b = t[(k + 1) % 3];
      if (a == b) continue;
      if (++directed_uses[std::uint64_t{a} << 32 | b] == 2) ++audit.orientation_conflicts;
      const EdgeRef e = undirected(a, b);
      ++incidence[std::uint64_t{e.first} << 32 | e.second];
    }
  }

  audit.vertex_count = static_cast<std::size_t>(std::count(referenced.begin(), referenced.end(), true));
  audit.edge_count = incidence.size();
  audit.euler = static_cast<long long>(audit.vertex_count) - static_cast<long long>(audit.edge_count) +
                static_cast<long long>(audit.face_count);
  for (const auto& [packed, count] : incidence) {
    const EdgeRef edge{static_cast<std::uint32_t>(packed >> 32), static_cast<std::uint32_t>(packed)};
    if (count == 1) audit.boundary_edges.push_back(edge);
    if (count > 2) audit.nonmanifold_edges.push_back(edge);
  }
  std::sort(audit.boundary_edges.begin(), audit.boundary_edges.end());
  std::sort(audit.nonmanifold_edges.begin(), audit.nonmanifold_edges.end());

  {
    std::vector<std::uint32_t> ids;
    for (std::uint32_t i = 0; i < positions.size(); ++i)
      if (referenced[i]) ids.push_back(i);
    auto less = [&](std::uint32_t a, std::uint32_t b) {
      const Vec3 &p = positions[a], &q = positions[b];
      return std::tie(p.x, p.y, p.z) < std::tie(q.x, q.y, q.z);
    };
    std::sort(ids.begin(), ids.end(), less);
    for (std::size_t i = 1; i < ids.size(); ++i)
      if (positions[ids[i]] == positions[ids[i - 1]]) ++audit.duplicate_vertices;
  }

  // A hanging vertex always sits on an open edge, so only boundary geometry
  // needs scanning. Candidates are pruned by their x extent.
  if (!audit.boundary_edges.empty()) {
    std::vector<std::uint32_t> verts;
    for (const auto& [a, b] : audit.boundary_edges) {
      verts.push_back(a);
      verts.push_back(b);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    std::sort(verts.begin(), verts.end(),
              [&](std::uint32_t a, std::uint32_t b) { return positions[a].x < positions[b].x; });

    for (const auto& edge : audit.boundary_edges) {
      const Vec3 a = positions[edge.first];
      const Vec3 b = positions[edge.second];
      const double len = length(b - a);
      const double tol = options.relative_tolerance ? options.tjunction_tolerance * len
                                                     : options.tjunction_tolerance;
      const double lo = std::min(a.x, b.x) - tol;
      const double hi = std::max(a.x, b.x) + tol;
      auto it = std::lower_bound(verts.begin(), verts.end(), lo,
                                 [&](std::uint32_t v, double x) { return positions[v].x < x; });
      for (; it != verts.end() && positions[*it].x <= hi; ++it) {
        if (*it == edge.first || *it == edge.second) continue;
        if (strictly_inside(positions[*it], a, b, options)) audit.tjunctions.push_back({*it, edge});
      }
    }
    std::sort(audit.tjunctions.begin(), audit.tjunctions.end(),
              [](const TJunction& x, const TJunction& y) {
                return std::tie(x.vertex, x.edge) < std::tie(y.vertex, y.edge);
              });
  }
  return audit;
}

MeshAudit audit_mesh(const IndexedMesh& mesh, const AuditOptions& options) {
  return audit_mesh(mesh.world, mesh.triangles, options);
}

}  // namespace planetforge
