#include "planetforge/spheremap.hpp"

#include <cmath>
#include <string>

#include "planetforge/error.hpp"

namespace planetforge {
namespace {

constexpr std::array<FaceFrame, kFaceCount> kFrames{{
    {0, +1.0, 1, 2},  // +X
    {0, -1.0, 2, 1},  // -X
    {1, +1.0, 2, 0},  // +Y
    {1, -1.0, 0, 2},  // -Y
    {2, +1.0, 0, 1},  // +Z
    {2, -1.0, 1, 0},  // -Z
}};

constexpr std::array<std::string_view, kFaceCount> kFaceNames{"+X", "-X", "+Y", "-Y", "+Z", "-Z"};

Face face_with_normal(int axis, double sign) {
  for (int f = 0; f < kFaceCount; ++f)
    if (kFrames[f].normal_axis == axis && kFrames[f].normal_sign == sign) return static_cast<Face>(f);
  throw ConsistencyError("no cube face has the requested normal");
}

void check_face(Face face) {
  if (static_cast<int>(face) >= kFaceCount) throw InvalidArgument("invalid cube face");
}

}  // namespace

std::string_view face_name(Face face) {
  check_face(face);
  return kFaceNames[static_cast<int>(face)];
}

Face face_from_name(std::string_view name) {
  for (int f = 0; f < kFaceCount; ++f)
    if (kFaceNames[f] == name) return static_cast<Face>(f);
  throw InvalidArgument("unknown face name '" + std::string(name) + "'");
}

std::string_view edge_name(Edge edge) {
  switch (edge) {
    case Edge::North: return "N";
    case Edge::South: return "S";
    case Edge::East: return "E";
    case Edge::West: return "W";
  }
  throw InvalidArgument("invalid edge");
}

FaceFrame face_frame(Face face) {
  check_face(face);
  return kFrames[static_cast<int>(face)];
}

FaceCoord to_face_coord(const FacePoint& p) {
  return {p.face, std::ldexp(static_cast<double>(p.u), -kParamBits),
          std::ldexp(static_cast<double>(p.v), -kParamBits)};
}

FacePoint canonicalize(const FacePoint& p) {
  check_face(p.face);
  if (p.u > kParamOne || p.v > kParamOne) throw InvalidArgument("face point outside [0, 1]");
  const bool on_boundary = p.u == 0 || p.v == 0 || p.u == kParamOne || p.v == kParamOne;
  if (!on_boundary) return p;

  constexpr auto one = static_cast<std::int64_t>(kParamOne);
  const FaceFrame frame = face_frame(p.face);
  std::array<std::int64_t, 3> cube{};
  cube[frame.normal_axis] = frame.normal_sign > 0 ? one : -one;
  cube[frame.u_axis] = 2 * static_cast<std::int64_t>(p.u) - one;
  cube[frame.v_axis] = 2 * static_cast<std::int64_t>(p.v) - one;

  for (int f = 0; f < kFaceCount; ++f) {
    const FaceFrame& owner = kFrames[f];
    if (cube[owner.normal_axis] != (owner.normal_sign > 0 ? one : -one)) continue;
    return {static_cast<Face>(f), static_cast<std::uint64_t>((cube[owner.u_axis] + one) / 2),
            static_cast<std::uint64_t>((cube[owner.v_axis] + one) / 2)};
  }
  throw ConsistencyError("canonicalize: point lies on no face");
}

FaceCoord canonicalize(const FaceCoord& c) {
  check_face(c.face);
  if (!(c.u >= 0.0 && c.u <= 1.0 && c.v >= 0.0 && c.v <= 1.0))
    throw InvalidArgument("face coordinate outside [0, 1]");
  if (c.u != 0.0 && c.u != 1.0 && c.v != 0.0 && c.v != 1.0) return c;

  const FaceFrame frame = face_frame(c.face);
  Vec3 cube;
  cube[frame.normal_axis] = frame.normal_sign;
  cube[frame.u_axis] = 2.0 * c.u - 1.0;
  cube[frame.v_axis] = 2.0 * c.v - 1.0;
  for (int f = 0; f < kFaceCount; ++f) {
    const FaceFrame& owner = kFrames[f];
    if (cube[owner.normal_axis] != owner.normal_sign) continue;
    return {static_cast<Face>(f), (cube[owner.u_axis] + 1.0) / 2.0,
            (cube[owner.v_axis] + 1.0) / 2.0};
  }
  throw ConsistencyError("canonicalize: point lies on no face");
}

Vec3 face_to_unit_sphere(const FaceCoord& c) {
  check_face(c.face);
  if (!(c.u >= 0.0 && c.u <= 1.0 && c.v >= 0.0 && c.v <= 1.0))
    throw InvalidArgument("face_to_unit_sphere: (u, v) must lie in [0, 1]");
  const FaceFrame frame = face_frame(c.face);
  Vec3 cube;
  cube[frame.normal_axis] = frame.normal_sign;
  cube[frame.u_axis] = 2.0 * c.u - 1.0;
  cube[frame.v_axis] = 2.0 * c.v - 1.0;
  return normalize(cube);
}

Vec3 face_to_unit_sphere(const FacePoint& p) { return face_to_unit_sphere(to_face_coord(p)); }

void PlanetSpec::validate() const {
  if (!(base_radius > 0.0) || !std::isfinite(base_radius))
    throw InvalidArgument("planet.base_radius must be > 0");
  if (!(oblateness >= 0.0 && oblateness < 0.5))
    throw InvalidArgument("planet.oblateness must be in [0, 0.5)");
  if (max_depth < 0 || max_depth > 24) throw InvalidArgument("planet.max_depth must be in [0, 24]");
  elevation_noise.validate();
  detail_noise.validate();
}

double PlanetSpec::elevation_bound() const {
  return elevation_noise.amplitude * elevation_noise.octave_bound();
}

double PlanetSpec::detail_bound() const {
  return detail_noise.amplitude * detail_noise.octave_bound();
}

double planet_elevation(Vec3 direction, const PlanetSpec& spec) {
  if (spec.elevation_noise.amplitude == 0.0) return 0.0;
  return spec.elevation_noise.amplitude * fbm3(direction * spec.base_radius, spec.elevation_noise);
}

Vec3 apply_oblateness(Vec3 point, const PlanetSpec& spec) {
  return {point.x, point.y, point.z * (1.0 - spec.oblateness)};
}

Vec3 surface_position(const FaceCoord& c, const PlanetSpec& spec) {
  const Vec3 d = face_to_unit_sphere(canonicalize(c));
  const double r = spec.base_radius + planet_elevation(d, spec);
  return apply_oblateness(d * r, spec);
}

EdgeLink face_adjacency(Face face, Edge edge) {
  const FaceFrame frame = face_frame(face);
  int out_axis = 0;
  double out_sign = 1.0;
  switch (edge) {
    case Edge::North: out_axis = frame.v_axis; out_sign = +1.0; break;
    case Edge::South: out_axis = frame.v_axis; out_sign = -1.0; break;
    case Edge::East: out_axis = frame.u_axis; out_sign = +1.0; break;
    case Edge::West: out_axis = frame.u_axis; out_sign = -1.0; break;
  }
  const Face neighbor = face_with_normal(out_axis, out_sign);
  const FaceFrame nf = face_frame(neighbor);

  // The shared edge sits on the neighbour's side facing our normal.
  Edge shared;
  if (nf.u_axis == frame.normal_axis)
    shared = frame.normal_sign > 0 ? Edge::East : Edge::West;
  else
    shared = frame.normal_sign > 0 ? Edge::North : Edge::South;

  // The along-edge axis is the same world axis on both faces, and every
  // tangent points along a positive axis, so the parameter never reverses.
  return {neighbor, shared, false};
}

}  // namespace planetforge
