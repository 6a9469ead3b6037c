#include "planetforge/tessellator.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>

#include "planetforge/error.hpp"
#include "planetforge/parallel.hpp"

namespace planetforge {
namespace {

void check_levels(const QuadKey& key, const std::array<int, 4>& neighbor_levels, const char* who) {
  for (Edge e : kEdges) {
    const int nl = neighbor_levels[static_cast<int>(e)];
    if (std::abs(nl - key.level) > 1)
      throw InvalidArgument(std::string(who) + ": neighbour level " + std::to_string(nl) +
                            " across edge " + std::string(edge_name(e)) + " differs from key level " +
                            std::to_string(key.level) + " by more than one");
  }
}

PatchVertex make_vertex(const FacePoint& param, const Terrain& terrain) {
  PatchVertex v;
  v.param = param;
  v.canonical = terrain.canonical(param);
  const SurfaceSample s = terrain.sample(v.canonical);
  v.world = s.world;
  v.up = s.up;
  v.elevation = s.elevation;
  return v;
}

std::uint64_t directed(std::uint32_t a, std::uint32_t b) {
  return std::uint64_t{a} << 32 | b;
}

}  // namespace

std::size_t expected_triangle_count(int inner_level, int finer_edges) {
  const std::size_t side = std::size_t{1} << inner_level;
  return 2 * side * side + static_cast<std::size_t>(finer_edges) * side;
}

PatchMesh tessellate_patch(const QuadKey& key, const std::array<int, 4>& neighbor_levels,
                           int inner_level, const Terrain& terrain) {
  if (!key.valid()) throw InvalidArgument("tessellate_patch: invalid key");
  if (inner_level < 0 || inner_level > kMaxInnerLevel)
    throw InvalidArgument("tessellate_patch: inner level must be in [0, 6]");
  check_levels(key, neighbor_levels, "tessellate_patch");

  const std::uint32_t n = std::uint32_t{1} << inner_level;
  const int sub_bits = inner_level + 1;  // leaves room for crack midpoints
  PatchMesh patch;
  patch.key = key;
  patch.inner_level = inner_level;
  patch.neighbor_levels = neighbor_levels;
  patch.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (std::uint32_t b = 0; b <= n; ++b)
    for (std::uint32_t a = 0; a <= n; ++a)
      patch.vertices.push_back(make_vertex(key.param(2 * a, 2 * b, sub_bits), terrain));

  auto index = [n](std::uint32_t a, std::uint32_t b) { return b * (n + 1) + a; };
  patch.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (std::uint32_t b = 0; b < n; ++b) {
    for (std::uint32_t a = 0; a < n; ++a) {
      const std::uint32_t ll = index(a, b);
      const std::uint32_t lr = index(a + 1, b);
      const std::uint32_t ur = index(a + 1, b + 1);
      const std::uint32_t ul = index(a, b + 1);
      patch.triangles.push_back({ll, lr, ur});
      patch.triangles.push_back({ll, ur, ul});
    }
  }

  for (std::uint32_t t = 0; t <= n; ++t) {
    patch.boundary[static_cast<int>(Edge::South)].push_back(index(t, 0));
    patch.boundary[static_cast<int>(Edge::North)].push_back(index(t, n));
    patch.boundary[static_cast<int>(Edge::West)].push_back(index(0, t));
    patch.boundary[static_cast<int>(Edge::East)].push_back(index(n, t));
  }
  return patch;
}

PatchMesh tessellate_patch(const QuadKey& key, const std::array<int, 4>& neighbor_levels,
                           int inner_level, const PlanetSpec& spec) {
  return tessellate_patch(key, neighbor_levels, inner_level, PlanetTerrain(spec));
}

PatchMesh fix_cracks(PatchMesh patch, const std::array<int, 4>& neighbor_levels,
                     const Terrain& terrain) {
  check_levels(patch.key, neighbor_levels, "fix_cracks");

  std::unordered_map<std::uint64_t, std::uint32_t> owner;
  bool owner_built = false;
  auto build_owner = [&] {
    owner.clear();
    owner.reserve(patch.triangles.size() * 3);
    for (std::uint32_t t = 0; t < patch.triangles.size(); ++t) {
      const Triangle& tri = patch.triangles[t];
      for (int k = 0; k < 3; ++k) owner[directed(tri[k], tri[(k + 1) % 3])] = t;
    }
    owner_built = true;
  };

  for (Edge e : kEdges) {
    const int side = static_cast<int>(e);
    if (neighbor_levels[side] != patch.key.level + 1 || patch.refined[side]) continue;
    if (!owner_built) build_owner();

    const std::vector<std::uint32_t> old_boundary = patch.boundary[side];
    std::vector<std::uint32_t> new_boundary;
    new_boundary.reserve(2 * old_boundary.size() - 1);
    for (std::size_t s = 0; s + 1 < old_boundary.size(); ++s) {
      const std::uint32_t p = old_boundary[s];
      const std::uint32_t q = old_boundary[s + 1];

      const FacePoint& pp = patch.vertices[p].param;
      const FacePoint& qp = patch.vertices[q].param;
      const FacePoint mid{pp.face, (pp.u + qp.u) / 2, (pp.v + qp.v) / 2};
      const auto m = static_cast<std::uint32_t>(patch.vertices.size());
      patch.vertices.push_back(make_vertex(mid, terrain));

      // Orient the boundary segment the way the owning triangle walks it.
      std::uint32_t x = p;
      std::uint32_t y = q;
      auto it = owner.find(directed(x, y));
      if (it == owner.end()) {
        std::swap(x, y);
        it = owner.find(directed(x, y));
      }
      if (it == owner.end()) throw ConsistencyError("fix_cracks: boundary segment has no triangle");
      const std::uint32_t t = it->second;
      const Triangle tri = patch.triangles[t];
      int k = 0;
      while (!(tri[k] == x && tri[(k + 1) % 3] == y)) ++k;
      const std::uint32_t z = tri[(k + 2) % 3];

      // (x, y, z) -> (x, m, z) + (m, y, z), winding preserved.
      const auto second = static_cast<std::uint32_t>(patch.triangles.size());
      patch.triangles[t] = {x, m, z};
      patch.triangles.push_back({m, y, z});
      owner.erase(directed(x, y));
      owner[directed(x, m)] = t;
      owner[directed(m, z)] = t;
      owner[directed(z, x)] = t;
      owner[directed(m, y)] = second;
      owner[directed(y, z)] = second;
      owner[directed(z, m)] = second;

      new_boundary.push_back(p);
      new_boundary.push_back(m);
    }
    new_boundary.push_back(old_boundary.back());
    patch.boundary[side] = std::move(new_boundary);
    patch.refined[side] = true;
  }
  patch.neighbor_levels = neighbor_levels;
  return patch;
}

PatchMesh fix_cracks(PatchMesh patch, const std::array<int, 4>& neighbor_levels,
                     const PlanetSpec& spec) {
  return fix_cracks(std::move(patch), neighbor_levels, PlanetTerrain(spec));
}

PatchMesh apply_detail(PatchMesh patch, const Terrain& terrain, int active_level) {
  const NoiseSpec& detail = terrain.detail_noise();
  if (active_level != terrain.max_depth() || detail.amplitude == 0.0) return patch;
  for (PatchVertex& v : patch.vertices) {
    if (v.detailed) continue;
    const double d = tiled_detail(v.world, detail);
    v.world = v.world + v.up * d;
    v.elevation += d;
    v.detailed = true;
  }
  return patch;
}

PatchMesh apply_detail(PatchMesh patch, const PlanetSpec& spec, int active_level) {
  return apply_detail(std::move(patch), PlanetTerrain(spec), active_level);
}

PatchMesh build_patch(const ActiveKey& key, int inner_level, const Terrain& terrain) {
  PatchMesh patch = tessellate_patch(key.key, key.neighbor_levels, inner_level, terrain);
  patch = fix_cracks(std::move(patch), key.neighbor_levels, terrain);
  return apply_detail(std::move(patch), terrain, key.key.level);
}

std::vector<PatchMesh> build_patches(const ActiveSet& set, int inner_level, const Terrain& terrain) {
  std::vector<PatchMesh> patches(set.size());
  const auto keys = set.keys();
  parallel_for(keys.size(), [&](std::size_t i) {
    patches[i] = build_patch(keys[i], inner_level, terrain);
  });
  return patches;
}

void compute_normals(IndexedMesh& mesh) {
  std::vector<Vec3> acc(mesh.world.size());
  for (const Triangle& t : mesh.triangles) {
    const Vec3 a = mesh.world[t[0]];
    const Vec3 n = cross(mesh.world[t[1]] - a, mesh.world[t[2]] - a);
    acc[t[0]] += n;
    acc[t[1]] += n;
    acc[t[2]] += n;
  }
  mesh.normals.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = length(acc[i]);
    Vec3 n = len > 0.0 ? acc[i] / len : Vec3{mesh.up[i][0], mesh.up[i][1], mesh.up[i][2]};
    mesh.normals[i] = {static_cast<float>(n.x), static_cast<float>(n.y), static_cast<float>(n.z)};
  }
}

IndexedMesh weld(std::span<const PatchMesh> patches, Vec3 rebase_origin) {
  std::vector<std::uint32_t> order(patches.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return patches[a].key < patches[b].key;
  });

  struct Ref {
    FacePoint key;
    std::uint32_t patch;  // position in `order`
    std::uint32_t vertex;
  };
  std::vector<Ref> refs;
  std::size_t total = 0;
  for (const auto& p : patches) total += p.vertices.size();
  refs.reserve(total);
  for (std::uint32_t o = 0; o < order.size(); ++o) {
    const PatchMesh& p = patches[order[o]];
    for (std::uint32_t v = 0; v < p.vertices.size(); ++v) refs.push_back({p.vertices[v].canonical, o, v});
  }
  std::stable_sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) { return a.key < b.key; });

  IndexedMesh mesh;
  mesh.rebase_origin = rebase_origin;
  std::vector<std::vector<std::uint32_t>> remap(order.size());
  for (std::uint32_t o = 0; o < order.size(); ++o) remap[o].resize(patches[order[o]].vertices.size());

  auto vertex_of = [&](const Ref& r) -> const PatchVertex& {
    return patches[order[r.patch]].vertices[r.vertex];
  };
  auto same = [](const PatchVertex& a, const PatchVertex& b) {
    return a.world == b.world && a.elevation == b.elevation;
  };

  for (std::size_t g = 0; g < refs.size();) {
    std::size_t end = g + 1;
    while (end < refs.size() && refs[end].key == refs[g].key) ++end;

    const PatchVertex* plain = nullptr;
    const PatchVertex* detailed = nullptr;
    for (std::size_t r = g; r < end; ++r) {
      const PatchVertex& v = vertex_of(refs[r]);
      const PatchVertex*& slot = v.detailed ? detailed : plain;
      if (slot == nullptr) {
        slot = &v;
      } else if (!same(*slot, v)) {
        const FacePoint& k = refs[g].key;
        throw ConsistencyError("weld: vertices at canonical key (" + std::string(face_name(k.face)) +
                               ", " + std::to_string(k.u) + ", " + std::to_string(k.v) +
                               ") disagree");
      }
    }
    const PatchVertex& chosen = detailed != nullptr ? *detailed : *plain;
    const auto index = static_cast<std::uint32_t>(mesh.world.size());
    mesh.world.push_back(chosen.world);
    mesh.up.push_back({static_cast<float>(chosen.up.x), static_cast<float>(chosen.up.y),
                       static_cast<float>(chosen.up.z)});
    mesh.elevation.push_back(chosen.elevation);
    mesh.weld_keys.push_back(refs[g].key);
    for (std::size_t r = g; r < end; ++r) remap[refs[r].patch][refs[r].vertex] = index;
    g = end;
  }

  for (std::uint32_t o = 0; o < order.size(); ++o)
    for (const Triangle& t : patches[order[o]].triangles)
      mesh.triangles.push_back({remap[o][t[0]], remap[o][t[1]], remap[o][t[2]]});

  mesh.positions.resize(mesh.world.size());
  for (std::size_t i = 0; i < mesh.world.size(); ++i) {
    const Vec3 rel = mesh.world[i] - rebase_origin;
    mesh.positions[i] = {static_cast<float>(rel.x), static_cast<float>(rel.y), static_cast<float>(rel.z)};
  }
  compute_normals(mesh);
  mesh.triplanar.assign(mesh.world.size(), {0.0f, 0.0f, 0.0f});
  mesh.colors.assign(mesh.world.size(), {1.0f, 1.0f, 1.0f});
  return mesh;
}

}  // namespace planetforge
