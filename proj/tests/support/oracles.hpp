// Independent reference implementations used to check the library. They share
// no code with the modules under test beyond the basic geometry primitives.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "planetforge/lodtree.hpp"
#include "planetforge/spheremap.hpp"
#include "planetforge/tessellator.hpp"

namespace oracle {

using namespace planetforge;

// ---------------------------------------------------------------------------
// Restriction check by edge sampling.
//
// Every leaf registers the points strictly inside each of its four edges on a
// grid one level finer than the deepest leaf. A point strictly inside an edge
// is shared by exactly the two leaves on either side, so comparing the levels
// recorded per point finds every edge-adjacent pair without a neighbour
// function. Cube points are mapped to their owning face first.

struct EdgeSampleReport {
  std::size_t pairs = 0;       // sample points seen by two leaves
  std::size_t violations = 0;  // of those, level gap > 1
  std::size_t unpaired = 0;    // seen once (exterior of a flat root, or a gap)
  std::size_t crowded = 0;     // seen three or more times (overlap)
};

// Grid indices at resolution `res` (<= 25) are below 2^26, so packing is exact.
inline std::uint64_t point_id(const FacePoint& p, int res) {
  const int shift = kParamBits - res;
  return (static_cast<std::uint64_t>(p.face) << 54) | ((p.u >> shift) << 27) | (p.v >> shift);
}

template <typename Fn>
void for_each_edge_sample(const QuadKey& k, int res, Fn&& fn) {
  const std::uint64_t step = std::uint64_t{1} << (kParamBits - res);
  const std::uint64_t cell = std::uint64_t{1} << (kParamBits - k.level);
  const std::uint64_t u0 = k.i * cell, v0 = k.j * cell;
  const std::uint64_t n = cell / step;
  // Odd indices only: midpoints of the finest segments, never a leaf corner.
  for (std::uint64_t t = 1; t < n; t += 2) {
    fn(FacePoint{k.face, u0 + t * step, v0});
    fn(FacePoint{k.face, u0 + t * step, v0 + cell});
    fn(FacePoint{k.face, u0, v0 + t * step});
    fn(FacePoint{k.face, u0 + cell, v0 + t * step});
  }
}

inline EdgeSampleReport edge_sample_check(const std::vector<QuadKey>& keys, bool cube) {
  int deepest = 0;
  for (const auto& k : keys) deepest = std::max(deepest, k.level);
  const int res = deepest + 1;
  struct Seen {
    int count = 0;
    int lo = 1 << 30;
    int hi = -1;
  };
  std::unordered_map<std::uint64_t, Seen> seen;
  for (const auto& k : keys) {
    for_each_edge_sample(k, res, [&](FacePoint p) {
      if (cube) p = canonicalize(p);
      Seen& s = seen[point_id(p, res)];
      ++s.count;
      s.lo = std::min(s.lo, k.level);
      s.hi = std::max(s.hi, k.level);
    });
  }
  EdgeSampleReport r;
  for (const auto& [id, s] : seen) {
    if (s.count == 1) ++r.unpaired;
    if (s.count >= 3) ++r.crowded;
    if (s.count == 2) {
      ++r.pairs;
      if (s.hi - s.lo > 1) ++r.violations;
    }
  }
  return r;
}

// Brute-force fixpoint: split every leaf that is more than one level coarser
// than a leaf sharing one of its edges, until nothing changes.
inline std::vector<QuadKey> brute_force_restrict(std::vector<QuadKey> keys, bool cube) {
  while (true) {
    int deepest = 0;
    for (const auto& k : keys) deepest = std::max(deepest, k.level);
    const int res = deepest + 1;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> owners;
    for (std::size_t idx = 0; idx < keys.size(); ++idx) {
      for_each_edge_sample(keys[idx], res, [&](FacePoint p) {
        if (cube) p = canonicalize(p);
        owners[point_id(p, res)].push_back(idx);
      });
    }
    std::set<std::size_t> split;
    for (const auto& [id, list] : owners) {
      for (std::size_t a : list)
        for (std::size_t b : list)
          if (keys[b].level - keys[a].level > 1) split.insert(a);
    }
    if (split.empty()) break;
    std::vector<QuadKey> next;
    for (std::size_t idx = 0; idx < keys.size(); ++idx) {
      if (!split.contains(idx)) {
        next.push_back(keys[idx]);
        continue;
      }
      const QuadKey& k = keys[idx];
      for (std::uint32_t dj = 0; dj < 2; ++dj)
        for (std::uint32_t di = 0; di < 2; ++di)
          next.push_back(QuadKey{k.face, k.level + 1, 2 * k.i + di, 2 * k.j + dj});
    }
    keys = std::move(next);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

// ---------------------------------------------------------------------------
// Reference LOD traversal for a sphere without oblateness.
//
// Node bound: centre = base point at the node centre; radius = largest
// distance from the centre to the 4 corners and 4 edge midpoints, plus the
// relief bound. Size = longest of the 4 corner-to-corner edge chords. A node
// splits when size / max(dist(camera, centre) - radius, 1e-6 R) > k, or always
// when the camera is inside the sphere, down to max_depth.

inline double relief_bound(const PlanetSpec& s) {
  auto series = [](const NoiseSpec& n) {
    double sum = 0.0, w = 1.0;
    for (int i = 0; i < n.octaves; ++i) {
      sum += w;
      w *= n.gain;
    }
    return sum;
  };
  return s.elevation_noise.amplitude * series(s.elevation_noise) +
         s.detail_noise.amplitude * series(s.detail_noise);
}

inline Vec3 ref_base(Face f, double u, double v, double radius) {
  return face_to_unit_sphere(FaceCoord{f, u, v}) * radius;
}

inline void ref_descend(const QuadKey& k, Vec3 cam, const PlanetSpec& s, double k_threshold,
                        int depth, std::vector<QuadKey>& out) {
  const double n = std::ldexp(1.0, k.level);
  const double u0 = k.i / n, u1 = (k.i + 1) / n, v0 = k.j / n, v1 = (k.j + 1) / n;
  const double um = (k.i + 0.5) / n, vm = (k.j + 0.5) / n;
  const double R = s.base_radius;
  const Vec3 c = ref_base(k.face, um, vm, R);
  const Vec3 c00 = ref_base(k.face, u0, v0, R), c10 = ref_base(k.face, u1, v0, R);
  const Vec3 c01 = ref_base(k.face, u0, v1, R), c11 = ref_base(k.face, u1, v1, R);
  const Vec3 ring[8] = {c00, c10, c01, c11, ref_base(k.face, um, v0, R), ref_base(k.face, u0, vm, R),
                        ref_base(k.face, u1, vm, R), ref_base(k.face, um, v1, R)};
  double radius = 0.0;
  for (const Vec3& p : ring) radius = std::max(radius, distance(c, p));
  radius += relief_bound(s);
  const double size = std::max({distance(c00, c10), distance(c01, c11), distance(c00, c01),
                                distance(c10, c11)});
  const double gap = distance(cam, c) - radius;
  const bool split = k.level < depth && (gap <= 0.0 || size / std::max(gap, 1e-6 * R) > k_threshold);
  if (!split) {
    out.push_back(k);
    return;
  }
  for (std::uint32_t dj = 0; dj < 2; ++dj)
    for (std::uint32_t di = 0; di < 2; ++di)
      ref_descend(QuadKey{k.face, k.level + 1, 2 * k.i + di, 2 * k.j + dj}, cam, s, k_threshold,
                  depth, out);
}

inline std::vector<QuadKey> reference_select(Vec3 cam, const PlanetSpec& s, double k_threshold,
                                             int depth) {
  std::vector<QuadKey> raw;
  for (int f = 0; f < kFaceCount; ++f)
    ref_descend(QuadKey{static_cast<Face>(f), 0, 0, 0}, cam, s, k_threshold, depth, raw);
  return brute_force_restrict(std::move(raw), true);
}

// ---------------------------------------------------------------------------
// Point-on-segment T-junction scan in a 2D parameter plane. Counts (vertex,
// edge) pairs where the vertex lies strictly between the edge's endpoints.

struct P2 {
  double x, y;
};

inline std::size_t count_tjunctions(const std::vector<P2>& pts,
                                    const std::vector<std::array<std::uint32_t, 3>>& tris,
                                    double tol) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  std::size_t hits = 0;
  for (const auto& [a, b] : edges) {
    const P2 pa = pts[a], pb = pts[b];
    const double dx = pb.x - pa.x, dy = pb.y - pa.y;
    const double len = std::hypot(dx, dy);
    for (std::uint32_t v = 0; v < pts.size(); ++v) {
      if (v == a || v == b) continue;
      const P2 p = pts[v];
      const double cross = (p.x - pa.x) * dy - (p.y - pa.y) * dx;
      if (std::abs(cross) / len > tol) continue;
      const double t = ((p.x - pa.x) * dx + (p.y - pa.y) * dy) / (len * len);
      if (t * len > tol && (1.0 - t) * len > tol) ++hits;
    }
  }
  return hits;
}

// Merges the vertices of several patches by fixed-point parameter and returns
// 2D parameter positions plus remapped triangles. All patches must share a face.
struct ParamMesh {
  std::vector<P2> pts;
  std::vector<std::array<std::uint32_t, 3>> tris;
};

inline ParamMesh param_mesh(const std::vector<const PatchMesh*>& patches) {
  ParamMesh m;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> index;
  for (const PatchMesh* p : patches) {
    std::vector<std::uint32_t> remap(p->vertices.size());
    for (std::size_t v = 0; v < p->vertices.size(); ++v) {
      const FacePoint& q = p->vertices[v].param;
      auto [it, fresh] = index.try_emplace({q.u, q.v}, static_cast<std::uint32_t>(m.pts.size()));
      if (fresh) m.pts.push_back({std::ldexp(double(q.u), -kParamBits), std::ldexp(double(q.v), -kParamBits)});
      remap[v] = it->second;
    }
    for (const auto& t : p->triangles) m.tris.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Half-edge audit: every directed edge must occur once and have exactly one
// opposite twin; Euler characteristic from referenced vertices.

struct HalfEdgeAudit {
  long long V = 0, E = 0, F = 0;
  bool closed_manifold = false;
  long long euler() const { return V - E + F; }
};

inline HalfEdgeAudit half_edge_audit(const std::vector<std::array<std::uint32_t, 3>>& tris) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  std::set<std::uint32_t> verts;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) {
      ++directed[{t[e], t[(e + 1) % 3]}];
      verts.insert(t[e]);
    }
  HalfEdgeAudit a;
  a.V = static_cast<long long>(verts.size());
  a.F = static_cast<long long>(tris.size());
  bool ok = true;
  for (const auto& [he, n] : directed) {
    if (n != 1) ok = false;
    auto twin = directed.find({he.second, he.first});
    if (twin == directed.end() || twin->second != 1) ok = false;
  }
  a.E = static_cast<long long>(directed.size()) / 2;
  a.closed_manifold = ok && directed.size() % 2 == 0;
  return a;
}

inline HalfEdgeAudit half_edge_audit(const IndexedMesh& m) {
  return half_edge_audit(std::vector<std::array<std::uint32_t, 3>>(m.triangles.begin(), m.triangles.end()));
}

}  // namespace oracle
