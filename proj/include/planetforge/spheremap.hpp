#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "planetforge/noise.hpp"
#include "planetforge/vec3.hpp"

namespace planetforge {

// Cube faces. The numeric order is the ownership order for shared edges and
// corners: the lowest-index face owns a boundary sample.
enum class Face : std::uint8_t { PosX = 0, NegX = 1, PosY = 2, NegY = 3, PosZ = 4, NegZ = 5 };

inline constexpr int kFaceCount = 6;

// Edges of the unit parameter square: North v = 1, South v = 0, East u = 1,
// West u = 0.
enum class Edge : std::uint8_t { North = 0, South = 1, East = 2, West = 3 };

inline constexpr std::array<Edge, 4> kEdges{Edge::North, Edge::South, Edge::East, Edge::West};

std::string_view face_name(Face face);
Face face_from_name(std::string_view name);
std::string_view edge_name(Edge edge);

// Axis convention. Every face is parameterised as
//   cube_point = normal + (2u - 1) * tangent_u + (2v - 1) * tangent_v
// with tangents along positive world axes and tangent_u x tangent_v = normal:
//   +X: u->+Y v->+Z   -X: u->+Z v->+Y   +Y: u->+Z v->+X
//   -Y: u->+X v->+Z   +Z: u->+X v->+Y   -Z: u->+Y v->+X
// +Z is the polar axis that oblateness flattens.
struct FaceFrame {
  int normal_axis;
  double normal_sign;
  int u_axis;
  int v_axis;
};
FaceFrame face_frame(Face face);

struct FaceCoord {
  Face face = Face::PosX;
  double u = 0.0;
  double v = 0.0;
};

// Fixed-point parameter position: u and v in units of 2^-32, so [0, 1] maps to
// [0, kParamOne]. Quadtree vertices of every level up to 31 are exact.
inline constexpr int kParamBits = 32;
inline constexpr std::uint64_t kParamOne = std::uint64_t{1} << kParamBits;

struct FacePoint {
  Face face = Face::PosX;
  std::uint64_t u = 0;
  std::uint64_t v = 0;

  friend constexpr auto operator<=>(const FacePoint&, const FacePoint&) = default;
};

FaceCoord to_face_coord(const FacePoint& p);

// Re-expresses a point on a shared cube edge or corner on its owning face
// (the lowest face index touching it). Interior points are returned as is.
FacePoint canonicalize(const FacePoint& p);
FaceCoord canonicalize(const FaceCoord& c);

// Unit direction through the cube point for c. Throws InvalidArgument when
// u or v leaves [0, 1].
Vec3 face_to_unit_sphere(const FaceCoord& c);
Vec3 face_to_unit_sphere(const FacePoint& p);

struct PlanetSpec {
  double base_radius = 1.0;
  double oblateness = 0.0;  // flattening f; polar radius = base_radius * (1 - f)
  NoiseSpec elevation_noise{.seed = 0, .octaves = 6, .frequency = 2.0, .amplitude = 0.02};
  NoiseSpec detail_noise{.seed = 1, .octaves = 4, .frequency = 64.0, .amplitude = 0.0};
  int max_depth = 5;

  void validate() const;

  // Upper bound on |elevation| from the elevation layer.
  double elevation_bound() const;
  // Upper bound on |displacement| from the detail layer.
  double detail_bound() const;

  friend bool operator==(const PlanetSpec&, const PlanetSpec&) = default;
};

// Elevation above base_radius for a unit direction.
double planet_elevation(Vec3 direction, const PlanetSpec& spec);

// Scales a displaced sphere point to the oblate spheroid (z is polar).
Vec3 apply_oblateness(Vec3 point, const PlanetSpec& spec);

// d = face_to_unit_sphere(canonical c); r = base_radius + elevation(d);
// result = (d.x r, d.y r, d.z r (1 - f)).
Vec3 surface_position(const FaceCoord& c, const PlanetSpec& spec);

struct EdgeLink {
  Face face;
  Edge edge;
  // True when the along-edge parameter runs in opposite directions on the two
  // faces. Always false under the axis convention above, kept so callers do
  // not depend on that.
  bool flipped;

  friend constexpr bool operator==(const EdgeLink&, const EdgeLink&) = default;
};

// Neighbouring face across `edge` and the edge of that face which is shared.
EdgeLink face_adjacency(Face face, Edge edge);

}  // namespace planetforge
