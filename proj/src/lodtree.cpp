#include "planetforge/lodtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "planetforge/error.hpp"

namespace planetforge {

bool QuadKey::valid() const {
  return static_cast<int>(face) < kFaceCount && level >= 0 && level <= kMaxLevel &&
         i < cells_per_side() && j < cells_per_side();
}

QuadKey QuadKey::parent() const {
  if (level == 0) throw InvalidArgument("root key has no parent");
  return {face, level - 1, i >> 1, j >> 1};
}

std::array<QuadKey, 4> QuadKey::children() const {
  if (level >= kMaxLevel) throw InvalidArgument("key is at the deepest supported level");
  const int l = level + 1;
  return {{{face, l, 2 * i, 2 * j},
           {face, l, 2 * i + 1, 2 * j},
           {face, l, 2 * i, 2 * j + 1},
           {face, l, 2 * i + 1, 2 * j + 1}}};
}

QuadKey QuadKey::ancestor(int at_level) const {
  if (at_level < 0 || at_level > level) throw InvalidArgument("ancestor level out of range");
  const int shift = level - at_level;
  return {face, at_level, i >> shift, j >> shift};
}

bool QuadKey::contains(const QuadKey& other) const {
  if (other.face != face || other.level < level) return false;
  const int shift = other.level - level;
  return (other.i >> shift) == i && (other.j >> shift) == j;
}

FacePoint QuadKey::param(std::uint64_t a, std::uint64_t b, int sub_bits) const {
  const int cell_shift = kParamBits - level;
  const int sub_shift = cell_shift - sub_bits;
  if (sub_shift < 0) throw InvalidArgument("parameter resolution exceeds 2^-32");
  return {face, (std::uint64_t{i} << cell_shift) + (a << sub_shift),
          (std::uint64_t{j} << cell_shift) + (b << sub_shift)};
}

std::size_t QuadKeyHash::operator()(const QuadKey& k) const noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(k.face) << 8 | static_cast<std::uint64_t>(k.level));
  h = mix64(h ^ (std::uint64_t{k.i} << 32 | k.j));
  return static_cast<std::size_t>(h);
}

std::optional<QuadKey> neighbor(const QuadKey& key, Edge edge, Topology topology) {
  if (!key.valid()) throw InvalidArgument("neighbor: invalid key");
  const std::uint32_t n = key.cells_per_side();
  QuadKey out = key;
  switch (edge) {
    case Edge::North:
      if (key.j + 1 < n) { ++out.j; return out; }
      break;
    case Edge::South:
      if (key.j > 0) { --out.j; return out; }
      break;
    case Edge::East:
      if (key.i + 1 < n) { ++out.i; return out; }
      break;
    case Edge::West:
      if (key.i > 0) { --out.i; return out; }
      break;
  }
  if (topology == Topology::Flat) return std::nullopt;

  const EdgeLink link = face_adjacency(key.face, edge);
  std::uint32_t along = (edge == Edge::North || edge == Edge::South) ? key.i : key.j;
  if (link.flipped) along = n - 1 - along;
  out.face = link.face;
  switch (link.edge) {
    case Edge::North: out.i = along; out.j = n - 1; break;
    case Edge::South: out.i = along; out.j = 0; break;
    case Edge::East: out.i = n - 1; out.j = along; break;
    case Edge::West: out.i = 0; out.j = along; break;
  }
  return out;
}

void LodConfig::validate() const {
  if (!(split_threshold > 0.0) || !std::isfinite(split_threshold))
    throw InvalidArgument("lod.split_threshold must be > 0");
  if (max_depth < 0 || max_depth > kMaxLevel) throw InvalidArgument("lod.max_depth must be in [0, 24]");
  if (viewport_height_px <= 0) throw InvalidArgument("lod.viewport_height_px must be > 0");
  if (!(vertical_fov > 0.0 && vertical_fov < std::numbers::pi))
    throw InvalidArgument("lod.vertical_fov must be in (0, pi)");
}

void CameraState::validate() const {
  if (!is_finite(position)) throw InvalidArgument("camera.position must be finite");
  constexpr double kTol = 1e-6;
  if (!is_finite(forward) || std::abs(length(forward) - 1.0) > kTol)
    throw InvalidArgument("camera.forward must be a unit vector");
  if (!is_finite(up) || std::abs(length(up) - 1.0) > kTol)
    throw InvalidArgument("camera.up must be a unit vector");
  if (length(cross(forward, up)) < kTol) throw InvalidArgument("camera.forward and camera.up are parallel");
}

CameraState CameraState::looking_at_origin(Vec3 position) {
  CameraState cam;
  cam.position = position;
  const double dist = length(position);
  cam.forward = dist > 0.0 ? -position / dist : Vec3{0.0, 0.0, -1.0};
  // Pick the world axis least aligned with forward and orthogonalize it.
  Vec3 hint{0.0, 0.0, 1.0};
  if (std::abs(cam.forward.z) > 0.9) hint = {0.0, 1.0, 0.0};
  cam.up = normalize(hint - cam.forward * dot(hint, cam.forward));
  return cam;
}

ActiveSet::ActiveSet(std::vector<ActiveKey> keys, Topology topology)
    : keys_(std::move(keys)), topology_(topology) {
  std::sort(keys_.begin(), keys_.end(),
            [](const ActiveKey& a, const ActiveKey& b) { return a.key < b.key; });
}

bool ActiveSet::contains(const QuadKey& key) const {
  return std::binary_search(keys_.begin(), keys_.end(), ActiveKey{key, {}},
                            [](const ActiveKey& a, const ActiveKey& b) { return a.key < b.key; });
}

std::vector<QuadKey> ActiveSet::key_list() const {
  std::vector<QuadKey> out;
  out.reserve(keys_.size());
  for (const auto& k : keys_) out.push_back(k.key);
  return out;
}

std::vector<std::size_t> ActiveSet::level_histogram() const {
  std::vector<std::size_t> hist;
  for (const auto& k : keys_) {
    if (static_cast<std::size_t>(k.key.level) >= hist.size()) hist.resize(k.key.level + 1, 0);
    ++hist[k.key.level];
  }
  return hist;
}

std::string ActiveSet::to_jsonl() const {
  std::string out;
  for (const auto& k : keys_) {
    nlohmann::ordered_json row;
    row["face"] = face_name(k.key.face);
    row["level"] = k.key.level;
    row["i"] = k.key.i;
    row["j"] = k.key.j;
    row["neighbors"] = k.neighbor_levels;
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<QuadKey> root_keys(Topology topology) {
  if (topology == Topology::Flat) return {QuadKey{kFlatFace, 0, 0, 0}};
  std::vector<QuadKey> roots;
  for (int f = 0; f < kFaceCount; ++f) roots.push_back({static_cast<Face>(f), 0, 0, 0});
  return roots;
}

NodeBound node_bound(const QuadKey& key, const Terrain& terrain) {
  const std::array<Vec3, 4> corners{
      terrain.base_point(key.param(0, 0, 0)), terrain.base_point(key.param(1, 0, 0)),
      terrain.base_point(key.param(0, 1, 0)), terrain.base_point(key.param(1, 1, 0))};
  const std::array<Vec3, 4> mids{
      terrain.base_point(key.param(1, 0, 1)), terrain.base_point(key.param(0, 1, 1)),
      terrain.base_point(key.param(2, 1, 1)), terrain.base_point(key.param(1, 2, 1))};

  NodeBound b;
  b.center = terrain.base_point(key.param(1, 1, 1));
  for (const Vec3& p : corners) b.radius = std::max(b.radius, distance(b.center, p));
  for (const Vec3& p : mids) b.radius = std::max(b.radius, distance(b.center, p));
  b.radius += terrain.relief_bound();
  b.edge_length = std::max({distance(corners[0], corners[1]), distance(corners[2], corners[3]),
                            distance(corners[0], corners[2]), distance(corners[1], corners[3])});
  return b;
}

double split_metric(const NodeBound& bound, Vec3 camera_position, double scale) {
  const double gap = distance(camera_position, bound.center) - bound.radius;
  if (gap <= 0.0) return std::numeric_limits<double>::infinity();
  return bound.edge_length / std::max(gap, 1e-6 * scale);
}

void check_coverage(std::span<const QuadKey> keys, Topology topology) {
  KeySet set;
  std::array<std::uint64_t, kFaceCount> area{};
  for (const QuadKey& k : keys) {
    if (!k.valid()) throw InvalidArgument("coverage: invalid key");
    if (topology == Topology::Flat && k.face != kFlatFace)
      throw InvalidArgument("coverage: flat terrain keys must use the flat face");
    if (!set.insert(k).second) throw InvalidArgument("coverage: duplicate key");
    area[static_cast<int>(k.face)] += std::uint64_t{1} << (2 * (kMaxLevel - k.level));
  }
  for (const QuadKey& k : keys)
    for (int l = 0; l < k.level; ++l)
      if (set.contains(k.ancestor(l))) throw InvalidArgument("coverage: overlapping keys");
  constexpr std::uint64_t kFull = std::uint64_t{1} << (2 * kMaxLevel);
  for (const QuadKey& root : root_keys(topology))
    if (area[static_cast<int>(root.face)] != kFull)
      throw InvalidArgument("coverage: keys leave a gap on face " + std::string(face_name(root.face)));
  for (int f = 0; f < kFaceCount; ++f) {
    if (topology == Topology::Flat && static_cast<Face>(f) != kFlatFace && area[f] != 0)
      throw InvalidArgument("coverage: keys outside the flat root");
  }
}

namespace {

// Leaf covering the same-level key `probe`: probe itself or an ancestor.
std::optional<QuadKey> covering_leaf(const KeySet& leaves, const QuadKey& probe) {
  for (int l = probe.level; l >= 0; --l) {
    const QuadKey a = probe.ancestor(l);
    if (leaves.contains(a)) return a;
  }
  return std::nullopt;
}

int neighbor_level(const KeySet& leaves, const QuadKey& key, Edge edge, Topology topology) {
  const auto n = neighbor(key, edge, topology);
  if (!n) return key.level;
  if (const auto cover = covering_leaf(leaves, *n)) return cover->level;
  // Subdivided; restriction makes every leaf along the edge one level finer.
  return key.level + 1;
}

ActiveSet annotate(const KeySet& leaves, Topology topology) {
  std::vector<ActiveKey> out;
  out.reserve(leaves.size());
  for (const QuadKey& k : leaves) {
    ActiveKey ak{k, {}};
    for (Edge e : kEdges) ak.neighbor_levels[static_cast<int>(e)] = neighbor_level(leaves, k, e, topology);
    out.push_back(ak);
  }
  return ActiveSet(std::move(out), topology);
}

}  // namespace

ActiveSet restrict(std::span<const QuadKey> keys, Topology topology) {
  check_coverage(keys, topology);

  KeySet leaves(keys.begin(), keys.end());
  std::vector<std::vector<QuadKey>> by_level(kMaxLevel + 1);
  for (const QuadKey& k : keys) by_level[k.level].push_back(k);

  // Finest first: splitting only ever creates keys coarser than the one
  // being processed, so each bucket is final when its turn comes.
  for (int level = kMaxLevel; level >= 2; --level) {
    for (std::size_t idx = 0; idx < by_level[level].size(); ++idx) {
      const QuadKey key = by_level[level][idx];
      if (!leaves.contains(key)) continue;
      for (Edge e : kEdges) {
        const auto n = neighbor(key, e, topology);
        if (!n) continue;
        auto cover = covering_leaf(leaves, *n);
        while (cover && cover->level < level - 1) {
          leaves.erase(*cover);
          QuadKey next{};
          for (const QuadKey& child : cover->children()) {
            leaves.insert(child);
            by_level[child.level].push_back(child);
            if (child.contains(*n)) next = child;
          }
          cover = next;
        }
      }
    }
  }
  return annotate(leaves, topology);
}

bool is_restricted(const ActiveSet& set) {
  for (const ActiveKey& k : set.keys())
    for (int level : k.neighbor_levels)
      if (std::abs(level - k.key.level) > 1) return false;
  return true;
}

ActiveSet select_lod(const CameraState& camera, const Terrain& terrain, const LodConfig& cfg) {
  camera.validate();
  cfg.validate();
  const int depth_limit = std::min(cfg.max_depth, terrain.max_depth());

  std::vector<QuadKey> leaves;
  std::vector<QuadKey> stack = root_keys(terrain.topology());
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    const QuadKey key = stack.back();
    stack.pop_back();
    bool split = false;
    if (key.level < depth_limit) {
      const double rho = split_metric(node_bound(key, terrain), camera.position, terrain.scale());
      split = rho > cfg.split_threshold;
    }
    if (split) {
      const auto kids = key.children();
      stack.insert(stack.end(), kids.rbegin(), kids.rend());
    } else {
      leaves.push_back(key);
    }
  }
  return restrict(leaves, terrain.topology());
}

ActiveSet select_lod(const CameraState& camera, const PlanetSpec& spec, const LodConfig& cfg) {
  return select_lod(camera, PlanetTerrain(spec), cfg);
}

}  // namespace planetforge
