#include <doctest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include "planetforge/error.hpp"
#include "planetforge/lodtree.hpp"
#include "planetforge/mesh_audit.hpp"
#include "planetforge/parallel.hpp"
#include "planetforge/tessellator.hpp"
#include "planetforge/terrain.hpp"
#include "support/oracles.hpp"

using namespace planetforge;

namespace {

const PlanetSpec kSmooth{.elevation_noise = {.amplitude = 0.0}, .max_depth = 5};
const PlanetSpec kRough{
    .base_radius = 2.0,
    .oblateness = 0.03,
    .elevation_noise = {.seed = 9, .octaves = 5, .frequency = 1.5, .amplitude = 0.05},
    .detail_noise = {.seed = 10, .octaves = 3, .frequency = 40.0, .amplitude = 0.004},
    .max_depth = 3,
};

bool same_bits(Vec3 a, Vec3 b) {
  return std::bit_cast<std::uint64_t>(a.x) == std::bit_cast<std::uint64_t>(b.x) &&
         std::bit_cast<std::uint64_t>(a.y) == std::bit_cast<std::uint64_t>(b.y) &&
         std::bit_cast<std::uint64_t>(a.z) == std::bit_cast<std::uint64_t>(b.z);
}

double param_area(const PatchMesh& p, const Triangle& t) {
  auto uv = [&](std::uint32_t i) {
    return std::pair{std::ldexp(double(p.vertices[i].param.u), -kParamBits),
                     std::ldexp(double(p.vertices[i].param.v), -kParamBits)};
  };
  const auto [ax, ay] = uv(t[0]);
  const auto [bx, by] = uv(t[1]);
  const auto [cx, cy] = uv(t[2]);
  return 0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

std::array<int, 4> levels_with_finer(int level, unsigned mask) {
  std::array<int, 4> n{level, level, level, level};
  for (int e = 0; e < 4; ++e)
    if (mask & (1u << e)) n[e] = level + 1;
  return n;
}

// Along-edge parameter of each boundary vertex, in units of the key size.
std::vector<double> boundary_params(const PatchMesh& p, Edge e) {
  std::vector<double> out;
  const double cell = std::ldexp(1.0, -p.key.level);
  for (std::uint32_t v : p.boundary[static_cast<int>(e)]) {
    const FacePoint& q = p.vertices[v].param;
    const double along = (e == Edge::North || e == Edge::South) ? std::ldexp(double(q.u), -kParamBits) - p.key.i * cell
                                                              : std::ldexp(double(q.v), -kParamBits) - p.key.j * cell;
    out.push_back(along / cell);
  }
  return out;
}

}  // namespace

TEST_CASE("tessellate_patch counts and boundary parameters") {
  const QuadKey root{Face::PosY, 0, 0, 0};
  const PatchMesh t0 = tessellate_patch(root, {0, 0, 0, 0}, 0, kSmooth);
  CHECK(t0.triangles.size() == 2);
  CHECK(t0.vertices.size() == 4);
  for (int t = 0; t <= kMaxInnerLevel; ++t) {
    const PatchMesh p = tessellate_patch(root, {0, 0, 0, 0}, t, kSmooth);
    REQUIRE(p.triangles.size() == 2 * (std::size_t{1} << (2 * t)));
    REQUIRE(p.triangles.size() == expected_triangle_count(t, 0));
  }
  const PatchMesh t2 = tessellate_patch(root, {0, 0, 0, 0}, 2, kSmooth);
  for (Edge e : kEdges) CHECK(boundary_params(t2, e) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  for (const Triangle& tri : t2.triangles) CHECK(param_area(t2, tri) > 0.0);

  CHECK_THROWS_AS(tessellate_patch(root, {0, 0, 0, 0}, kMaxInnerLevel + 1, kSmooth), InvalidArgument);
  CHECK_THROWS_AS(tessellate_patch(root, {0, 0, 0, 0}, -1, kSmooth), InvalidArgument);
  const QuadKey mid{Face::PosY, 2, 1, 1};
  CHECK_THROWS_AS(tessellate_patch(mid, {2, 2, 4, 2}, 1, kSmooth), InvalidArgument);
  CHECK_THROWS_AS(tessellate_patch(mid, {2, 0, 2, 2}, 1, kSmooth), InvalidArgument);
}

TEST_CASE("fix_cracks triangle counts over every finer-edge subset") {
  const QuadKey key{Face::NegZ, 2, 1, 2};
  for (int t = 0; t <= 3; ++t) {
    for (unsigned mask = 0; mask < 16; ++mask) {
      const auto levels = levels_with_finer(2, mask);
      const int f = std::popcount(mask);
      const PatchMesh fixed = fix_cracks(tessellate_patch(key, levels, t, kSmooth), levels, kSmooth);
      // Enumeration: 2 * 4^t base triangles, each finer edge bisects 2^t of them.
      const std::size_t expected = 2 * (std::size_t{1} << (2 * t)) + f * (std::size_t{1} << t);
      REQUIRE(fixed.triangles.size() == expected);
      REQUIRE(expected_triangle_count(t, f) == expected);
      for (const Triangle& tri : fixed.triangles) REQUIRE(param_area(fixed, tri) > 0.0);
      for (Edge e : kEdges) {
        const bool finer = mask & (1u << static_cast<int>(e));
        const std::size_t n = (std::size_t{1} << t) * (finer ? 2 : 1) + 1;
        const auto params = boundary_params(fixed, e);
        REQUIRE(params.size() == n);
        for (std::size_t k = 0; k < n; ++k) REQUIRE(params[k] == double(k) / double(n - 1));
      }
      // Applying the repair again changes nothing.
      const PatchMesh again = fix_cracks(fixed, levels, kSmooth);
      REQUIRE(again.triangles == fixed.triangles);
      REQUIRE(again.vertices.size() == fixed.vertices.size());
    }
  }
  CHECK(expected_triangle_count(1, 1) == 10);
  CHECK(expected_triangle_count(2, 2) == 40);
}

TEST_CASE("fix_cracks leaves equal-level patches unchanged and rejects big level gaps") {
  const QuadKey key{Face::PosX, 1, 1, 0};
  const PatchMesh p = tessellate_patch(key, {1, 1, 1, 1}, 3, kSmooth);
  const PatchMesh q = fix_cracks(p, {1, 1, 1, 1}, kSmooth);
  CHECK(q.triangles == p.triangles);
  CHECK(q.vertices.size() == p.vertices.size());
  CHECK_THROWS_AS(fix_cracks(p, {1, 3, 1, 1}, kSmooth), InvalidArgument);
}

TEST_CASE("two-patch fixture: T-junctions before the repair, none after") {
  // Coarse (1, 0, 0) has a finer neighbour (2, 2, 0) across its east edge.
  const QuadKey coarse{Face::PosZ, 1, 0, 0};
  const QuadKey fine{Face::PosZ, 2, 2, 0};
  const std::array<int, 4> coarse_levels{1, 1, 2, 1};
  const std::array<int, 4> fine_levels{2, 2, 2, 1};
  for (int t = 1; t <= 3; ++t) {
    const PatchMesh c = tessellate_patch(coarse, coarse_levels, t, kSmooth);
    const PatchMesh f = tessellate_patch(fine, fine_levels, t, kSmooth);
    const auto before = oracle::param_mesh({&c, &f});
    // Each fine boundary vertex strictly inside a coarse boundary edge.
    CHECK(oracle::count_tjunctions(before.pts, before.tris, 1e-9) == (std::size_t{1} << (t - 1)));

    const PatchMesh fixed = fix_cracks(c, coarse_levels, kSmooth);
    CHECK(fixed.triangles.size() == expected_triangle_count(t, 1));
    const auto after = oracle::param_mesh({&fixed, &f});
    CHECK(oracle::count_tjunctions(after.pts, after.tris, 1e-9) == 0);
  }
}

TEST_CASE("apply_detail") {
  const PlanetTerrain rough(kRough);
  const QuadKey key{Face::NegY, 3, 4, 5};
  const PatchMesh p = tessellate_patch(key, {3, 3, 3, 3}, 2, rough);
  SUBCASE("coarse patches pass through") {
    const PatchMesh q = apply_detail(p, rough, 2);
    for (std::size_t i = 0; i < p.vertices.size(); ++i) REQUIRE(same_bits(q.vertices[i].world, p.vertices[i].world));
  }
  SUBCASE("zero amplitude passes through") {
    PlanetSpec flat_detail = kRough;
    flat_detail.detail_noise.amplitude = 0.0;
    const PatchMesh q = apply_detail(tessellate_patch(key, {3, 3, 3, 3}, 2, flat_detail), flat_detail, 3);
    for (std::size_t i = 0; i < p.vertices.size(); ++i) REQUIRE(same_bits(q.vertices[i].world, p.vertices[i].world));
  }
  SUBCASE("max-depth vertices move along the outward direction") {
    const PatchMesh q = apply_detail(p, rough, 3);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      const PatchVertex& a = p.vertices[i];
      const PatchVertex& b = q.vertices[i];
      REQUIRE(b.detailed);
      const double h = tiled_detail(a.world, kRough.detail_noise);
      REQUIRE(same_bits(b.world, a.world + a.up * h));
      moved += h != 0.0;
    }
    CHECK(moved > 0);
  }
}

TEST_CASE("detail displacement agrees bit for bit on shared patch boundaries") {
  const PlanetTerrain rough(kRough);
  // Uniform max-depth set: every patch is detailed.
  std::vector<QuadKey> keys;
  for (int f = 0; f < kFaceCount; ++f)
    for (std::uint32_t i = 0; i < 8; ++i)
      for (std::uint32_t j = 0; j < 8; ++j) keys.push_back({Face(f), 3, i, j});
  const ActiveSet set = restrict(keys, Topology::Cube);
  const auto patches = build_patches(set, 2, rough);
  std::map<FacePoint, Vec3> seen;
  std::size_t shared = 0;
  for (const PatchMesh& p : patches)
    for (const PatchVertex& v : p.vertices) {
      auto [it, fresh] = seen.try_emplace(v.canonical, v.world);
      if (!fresh) {
        ++shared;
        REQUIRE(same_bits(it->second, v.world));
      }
    }
  CHECK(shared > 0);
  CHECK_NOTHROW(weld(patches, {}));
}

TEST_CASE("weld") {
  const PlanetTerrain smooth(kSmooth);
  SUBCASE("single patch keeps its vertices and rebases positions") {
    const PatchMesh p = tessellate_patch({Face::PosX, 1, 0, 1}, {1, 1, 1, 1}, 3, smooth);
    const Vec3 origin{1.0, 0.25, -0.5};
    const IndexedMesh m = weld(std::vector<PatchMesh>{p}, origin);
    CHECK(m.vertex_count() == p.vertices.size());
    CHECK(m.triangles.size() == p.triangles.size());
    for (std::size_t i = 0; i < m.vertex_count(); ++i) {
      const Vec3 rel = m.world[i] - origin;
      REQUIRE(m.positions[i][0] == static_cast<float>(rel.x));
      REQUIRE(m.positions[i][1] == static_cast<float>(rel.y));
      REQUIRE(m.positions[i][2] == static_cast<float>(rel.z));
    }
  }
  SUBCASE("two equal-level neighbours share 2^t + 1 vertices") {
    for (int t = 0; t <= 4; ++t) {
      const PatchMesh a = tessellate_patch({Face::PosX, 1, 0, 0}, {1, 1, 1, 1}, t, smooth);
      const PatchMesh b = tessellate_patch({Face::PosX, 1, 1, 0}, {1, 1, 1, 1}, t, smooth);
      const IndexedMesh m = weld(std::vector<PatchMesh>{a, b}, {});
      const std::size_t side = (std::size_t{1} << t) + 1;
      REQUIRE(m.vertex_count() == 2 * side * side - side);
    }
  }
  SUBCASE("full planet at level 1 is a closed 2-manifold") {
    std::vector<QuadKey> keys;
    for (int f = 0; f < kFaceCount; ++f)
      for (std::uint32_t i = 0; i < 2; ++i)
        for (std::uint32_t j = 0; j < 2; ++j) keys.push_back({Face(f), 1, i, j});
    for (int t = 0; t <= 3; ++t) {
      const IndexedMesh m = weld(build_patches(restrict(keys, Topology::Cube), t, smooth), {});
      const auto he = oracle::half_edge_audit(m);
      REQUIRE(he.closed_manifold);
      REQUIRE(he.euler() == 2);
      const MeshAudit audit = audit_mesh(m);
      REQUIRE(audit.watertight());
      REQUIRE(audit.duplicate_vertices == 0);
      REQUIRE(audit.degenerate_triangles == 0);
    }
  }
  SUBCASE("output does not depend on patch order") {
    const ActiveSet set = select_lod(CameraState::looking_at_origin({0.3, 1.2, 0.4}), kRough,
                                     LodConfig{.split_threshold = 2.0, .max_depth = 3});
    auto patches = build_patches(set, 2, PlanetTerrain(kRough));
    const IndexedMesh a = weld(patches, {0.3, 1.2, 0.4});
    std::mt19937_64 rng(5);
    std::shuffle(patches.begin(), patches.end(), rng);
    const IndexedMesh b = weld(patches, {0.3, 1.2, 0.4});
    CHECK(a.positions == b.positions);
    CHECK(a.triangles == b.triangles);
    CHECK(a.normals == b.normals);
  }
  SUBCASE("disagreeing instances are a consistency error") {
    PatchMesh a = tessellate_patch({Face::PosX, 1, 0, 0}, {1, 1, 1, 1}, 1, smooth);
    const PatchMesh b = tessellate_patch({Face::PosX, 1, 1, 0}, {1, 1, 1, 1}, 1, smooth);
    a.vertices[a.boundary[static_cast<int>(Edge::East)][1]].world.x += 1e-9;
    CHECK_THROWS_AS(weld(std::vector<PatchMesh>{a, b}, {}), ConsistencyError);
  }
}

TEST_CASE("normals are unit length and point outward on a smooth sphere") {
  const ActiveSet set = select_lod(CameraState::looking_at_origin({0, 0, 4}), kSmooth, LodConfig{.max_depth = 5});
  const IndexedMesh m = weld(build_patches(set, 2, PlanetTerrain(kSmooth)), {});
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    const Vec3 n{m.normals[i][0], m.normals[i][1], m.normals[i][2]};
    REQUIRE(std::abs(length(n) - 1.0) < 1e-6);
    REQUIRE(dot(n, normalize(m.world[i])) > 0.99);
  }
}

TEST_CASE("patch building is independent of the worker count") {
  const ActiveSet set = select_lod(CameraState::looking_at_origin({0, 2.2, 0.1}), kRough,
                                   LodConfig{.split_threshold = 1.5, .max_depth = 3});
  set_worker_count(1);
  const IndexedMesh a = weld(build_patches(set, 3, PlanetTerrain(kRough)), {});
  set_worker_count(4);
  const IndexedMesh b = weld(build_patches(set, 3, PlanetTerrain(kRough)), {});
  set_worker_count(0);
  CHECK(a.positions == b.positions);
  CHECK(a.triangles == b.triangles);
  for (std::size_t i = 0; i < a.vertex_count(); ++i) REQUIRE(same_bits(a.world[i], b.world[i]));
}
