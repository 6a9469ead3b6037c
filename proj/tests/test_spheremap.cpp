#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "planetforge/error.hpp"
#include "planetforge/spheremap.hpp"

using namespace planetforge;

namespace {

bool same_bits(Vec3 a, Vec3 b) {
  return std::bit_cast<std::uint64_t>(a.x) == std::bit_cast<std::uint64_t>(b.x) &&
         std::bit_cast<std::uint64_t>(a.y) == std::bit_cast<std::uint64_t>(b.y) &&
         std::bit_cast<std::uint64_t>(a.z) == std::bit_cast<std::uint64_t>(b.z);
}

// Point on `edge` of `face` at along-edge parameter t.
FaceCoord on_edge(Face face, Edge edge, double t) {
  switch (edge) {
    case Edge::North: return {face, t, 1.0};
    case Edge::South: return {face, t, 0.0};
    case Edge::East: return {face, 1.0, t};
    case Edge::West: return {face, 0.0, t};
  }
  return {};
}

FacePoint on_edge(Face face, Edge edge, std::uint64_t t) {
  switch (edge) {
    case Edge::North: return {face, t, kParamOne};
    case Edge::South: return {face, t, 0};
    case Edge::East: return {face, kParamOne, t};
    case Edge::West: return {face, 0, t};
  }
  return {};
}

Face opposite(Face f) { return static_cast<Face>(static_cast<int>(f) ^ 1); }

const PlanetSpec kBumpy{
    .base_radius = 6.0,
    .oblateness = 0.05,
    .elevation_noise = {.seed = 3, .octaves = 5, .frequency = 1.5, .amplitude = 0.2},
};

}  // namespace

TEST_CASE("face and edge names") {
  for (int f = 0; f < kFaceCount; ++f) CHECK(face_from_name(face_name(Face(f))) == Face(f));
  CHECK(face_name(Face::NegY) == "-Y");
  CHECK(edge_name(Edge::East) == "E");
  CHECK_THROWS_AS(face_from_name("+W"), InvalidArgument);
}

TEST_CASE("face_to_unit_sphere examples") {
  const Vec3 pole = face_to_unit_sphere(FaceCoord{Face::PosZ, 0.5, 0.5});
  CHECK(pole.x == 0.0);
  CHECK(pole.y == 0.0);
  CHECK(pole.z == 1.0);

  const Vec3 corner = face_to_unit_sphere(FaceCoord{Face::PosX, 0.0, 0.0});
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(corner.x == doctest::Approx(s).epsilon(1e-15));
  CHECK(corner.y == doctest::Approx(-s).epsilon(1e-15));
  CHECK(corner.z == doctest::Approx(-s).epsilon(1e-15));

  for (int f = 0; f < kFaceCount; ++f)
    for (int a = 0; a <= 32; ++a)
      for (int b = 0; b <= 32; ++b)
        REQUIRE(std::abs(length(face_to_unit_sphere(FaceCoord{Face(f), a / 32.0, b / 32.0})) - 1.0) <= 1e-12);

  CHECK_THROWS_AS(face_to_unit_sphere(FaceCoord{Face::PosX, -0.1, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(face_to_unit_sphere(FaceCoord{Face::PosX, 0.5, 1.5}), InvalidArgument);
}

TEST_CASE("face frames follow the documented convention") {
  for (int f = 0; f < kFaceCount; ++f) {
    const FaceFrame fr = face_frame(Face(f));
    Vec3 n{}, tu{}, tv{};
    n[fr.normal_axis] = fr.normal_sign;
    tu[fr.u_axis] = 1.0;
    tv[fr.v_axis] = 1.0;
    const Vec3 c = cross(tu, tv);
    CHECK(c.x == n.x);
    CHECK(c.y == n.y);
    CHECK(c.z == n.z);
    // Face centre is the face normal.
    const Vec3 centre = face_to_unit_sphere(FaceCoord{Face(f), 0.5, 0.5});
    CHECK(same_bits(centre, n));
  }
}

TEST_CASE("surface_position examples") {
  PlanetSpec smooth{.base_radius = 3.0, .elevation_noise = {.amplitude = 0.0}};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 p = surface_position(FaceCoord{Face(n % 6), d(rng), d(rng)}, smooth);
    REQUIRE(std::abs(length(p) - 3.0) <= 4e-15 * 3.0);
  }
  smooth.oblateness = 0.1;
  const Vec3 pole = surface_position(FaceCoord{Face::PosZ, 0.5, 0.5}, smooth);
  CHECK(pole.x == 0.0);
  CHECK(pole.y == 0.0);
  CHECK(pole.z == 3.0 * (1.0 - 0.1));

  // Elevation is measured along the direction before flattening.
  const FaceCoord c{Face::NegY, 0.3, 0.7};
  const Vec3 dir = face_to_unit_sphere(c);
  const double e = kBumpy.elevation_noise.amplitude * fbm3(dir * kBumpy.base_radius, kBumpy.elevation_noise);
  const Vec3 p = surface_position(c, kBumpy);
  const double r = kBumpy.base_radius + e;
  CHECK(p.x == dir.x * r);
  CHECK(p.y == dir.y * r);
  CHECK(p.z == dir.z * r * (1.0 - kBumpy.oblateness));
}

TEST_CASE("face_adjacency is a symmetric involution over 24 directed edges") {
  for (int f = 0; f < kFaceCount; ++f) {
    std::set<Face> neighbours;
    for (Edge e : kEdges) {
      const EdgeLink link = face_adjacency(Face(f), e);
      const EdgeLink back = face_adjacency(link.face, link.edge);
      CHECK(back.face == Face(f));
      CHECK(back.edge == e);
      CHECK(back.flipped == link.flipped);
      CHECK(link.face != Face(f));
      CHECK(link.face != opposite(Face(f)));
      neighbours.insert(link.face);
    }
    CHECK(neighbours.size() == 4);
  }
}

TEST_CASE("identified edge samples map to the same direction on all 12 cube edges") {
  int edges_seen = 0;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int f = 0; f < kFaceCount; ++f) {
    for (Edge e : kEdges) {
      const EdgeLink link = face_adjacency(Face(f), e);
      if (static_cast<int>(link.face) < f) continue;  // count each cube edge once
      ++edges_seen;
      for (int n = 0; n <= 200; ++n) {
        const double t = n <= 64 ? n / 64.0 : d(rng);
        const double tn = link.flipped ? 1.0 - t : t;
        const FaceCoord a = on_edge(Face(f), e, t);
        const FaceCoord b = on_edge(link.face, link.edge, tn);
        // Geometric agreement without canonicalization.
        const Vec3 da = face_to_unit_sphere(a), db = face_to_unit_sphere(b);
        REQUIRE(distance(da, db) <= 1e-15);
        // Bit agreement after canonicalization, including elevation and flattening.
        REQUIRE(same_bits(surface_position(a, kBumpy), surface_position(b, kBumpy)));
        const FaceCoord ca = canonicalize(a), cb = canonicalize(b);
        REQUIRE(ca.face == cb.face);
        REQUIRE(ca.u == cb.u);
        REQUIRE(ca.v == cb.v);
        // Interior edge points belong to the lower face; corners may go to a third one.
        if (t > 0.0 && t < 1.0) REQUIRE(static_cast<int>(ca.face) == std::min(f, static_cast<int>(link.face)));
        else REQUIRE(static_cast<int>(ca.face) <= std::min(f, static_cast<int>(link.face)));
      }
    }
  }
  CHECK(edges_seen == 12);
}

TEST_CASE("fixed-point canonicalization") {
  std::mt19937_64 rng(3);
  for (int f = 0; f < kFaceCount; ++f) {
    for (Edge e : kEdges) {
      const EdgeLink link = face_adjacency(Face(f), e);
      for (int n = 0; n < 100; ++n) {
        const std::uint64_t t = n == 0 ? 0 : n == 1 ? kParamOne : rng() % (kParamOne + 1);
        const FacePoint a = on_edge(Face(f), e, t);
        const FacePoint b = on_edge(link.face, link.edge, link.flipped ? kParamOne - t : t);
        REQUIRE(canonicalize(a) == canonicalize(b));
        REQUIRE(same_bits(face_to_unit_sphere(canonicalize(a)), face_to_unit_sphere(canonicalize(b))));
        // Idempotent, and agrees with the floating-point overload.
        const FacePoint c = canonicalize(a);
        REQUIRE(canonicalize(c) == c);
        const FaceCoord cc = canonicalize(to_face_coord(a));
        REQUIRE(cc.face == c.face);
        REQUIRE(cc.u == to_face_coord(c).u);
        REQUIRE(cc.v == to_face_coord(c).v);
      }
    }
  }
  // The three faces meeting at each cube corner agree on one owner.
  std::set<FacePoint> corners;
  for (int f = 0; f < kFaceCount; ++f)
    for (std::uint64_t u : {std::uint64_t{0}, kParamOne})
      for (std::uint64_t v : {std::uint64_t{0}, kParamOne}) corners.insert(canonicalize(FacePoint{Face(f), u, v}));
  CHECK(corners.size() == 8);
  // Interior points are untouched.
  const FacePoint inner{Face::NegZ, 12345, 678910};
  CHECK(canonicalize(inner) == inner);
}

TEST_CASE("PlanetSpec validation") {
  CHECK_NOTHROW(PlanetSpec{}.validate());
  CHECK_THROWS_AS(PlanetSpec{.base_radius = 0.0}.validate(), InvalidArgument);
  CHECK_THROWS_AS(PlanetSpec{.oblateness = 0.5}.validate(), InvalidArgument);
  CHECK_THROWS_AS(PlanetSpec{.oblateness = -0.1}.validate(), InvalidArgument);
  CHECK_THROWS_AS(PlanetSpec{.max_depth = 25}.validate(), InvalidArgument);
  CHECK_THROWS_AS(PlanetSpec{.max_depth = -1}.validate(), InvalidArgument);
  PlanetSpec bad;
  bad.detail_noise.octaves = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
