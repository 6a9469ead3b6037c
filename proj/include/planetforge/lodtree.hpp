#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "planetforge/spheremap.hpp"
#include "planetforge/terrain.hpp"

namespace planetforge {

inline constexpr int kMaxLevel = 24;

// Quadtree node: face, level, and cell indices (i along u, j along v).
struct QuadKey {
  Face face = Face::PosX;
  int level = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  std::uint32_t cells_per_side() const { return std::uint32_t{1} << level; }
  bool valid() const;
  QuadKey parent() const;
  // Children ordered (0,0), (1,0), (0,1), (1,1) in (di, dj).
  std::array<QuadKey, 4> children() const;
  QuadKey ancestor(int at_level) const;
  // True when `other` equals this key or lies inside it.
  bool contains(const QuadKey& other) const;
  // Fixed-point parameter of the node-local position (a, b) / 2^sub_bits.
  FacePoint param(std::uint64_t a, std::uint64_t b, int sub_bits) const;

  friend constexpr auto operator<=>(const QuadKey&, const QuadKey&) = default;
};

struct QuadKeyHash {
  std::size_t operator()(const QuadKey& k) const noexcept;
};

using KeySet = std::unordered_set<QuadKey, QuadKeyHash>;

// Same-level neighbour across `edge`, or nullopt for the exterior of a flat
// terrain. Cube neighbours cross faces through face_adjacency.
std::optional<QuadKey> neighbor(const QuadKey& key, Edge edge, Topology topology);

struct LodConfig {
  double split_threshold = 2.0;  // k: split while edge / distance > k
  int max_depth = 5;
  int viewport_height_px = 1080;
  double vertical_fov = 1.0471975511965976;  // radians

  void validate() const;
};

struct CameraState {
  Vec3 position;
  Vec3 forward{0.0, 0.0, -1.0};
  Vec3 up{0.0, 1.0, 0.0};

  void validate() const;
  // Camera at `position` looking at the world origin (or down -z when at it).
  static CameraState looking_at_origin(Vec3 position);
};

struct ActiveKey {
  QuadKey key;
  // Level of the active leaves across each edge, indexed by Edge. Exterior
  // edges of a flat terrain report the key's own level.
  std::array<int, 4> neighbor_levels{};

  friend bool operator==(const ActiveKey&, const ActiveKey&) = default;
};

// Crack-consistent leaf set, sorted by QuadKey.
class ActiveSet {
 public:
  ActiveSet() = default;
  ActiveSet(std::vector<ActiveKey> keys, Topology topology);

  std::span<const ActiveKey> keys() const noexcept { return keys_; }
  std::size_t size() const noexcept { return keys_.size(); }
  Topology topology() const noexcept { return topology_; }
  bool contains(const QuadKey& key) const;
  std::vector<QuadKey> key_list() const;
  // Key count per level, index = level.
  std::vector<std::size_t> level_histogram() const;

  // One JSON object per line: face, level, i, j, neighbors [N, S, E, W].
  std::string to_jsonl() const;

  friend bool operator==(const ActiveSet& a, const ActiveSet& b) {
    return a.topology_ == b.topology_ && a.keys_ == b.keys_;
  }

 private:
  std::vector<ActiveKey> keys_;
  Topology topology_ = Topology::Cube;
};

// Bounding sphere and characteristic size of a node on the base surface,
// inflated by the terrain's relief bound.
struct NodeBound {
  Vec3 center;
  double radius = 0.0;
  double edge_length = 0.0;
};

NodeBound node_bound(const QuadKey& key, const Terrain& terrain);

// edge_length / max(distance to bounding sphere, 1e-6 * scale); +infinity when
// the camera is inside the sphere.
double split_metric(const NodeBound& bound, Vec3 camera_position, double scale);

// Throws InvalidArgument unless the keys tile every root exactly once.
void check_coverage(std::span<const QuadKey> keys, Topology topology);

// Minimal refinement in which edge-adjacent leaves differ by at most one level.
ActiveSet restrict(std::span<const QuadKey> keys, Topology topology);

// True when every edge-adjacent pair differs by at most one level.
bool is_restricted(const ActiveSet& set);

// Top-down split from the roots while split_metric > k and level < max_depth,
// followed by restrict().
ActiveSet select_lod(const CameraState& camera, const Terrain& terrain, const LodConfig& cfg);
ActiveSet select_lod(const CameraState& camera, const PlanetSpec& spec, const LodConfig& cfg);

// Root keys for a topology: six faces or the single flat root.
std::vector<QuadKey> root_keys(Topology topology);

}  // namespace planetforge
