#pragma once

#include <memory>
#include <optional>

#include "planetforge/heightfield.hpp"
#include "planetforge/spheremap.hpp"

namespace planetforge {

enum class Topology { Cube, Flat };

// One surface sample, before detail displacement.
struct SurfaceSample {
  Vec3 world;        // double-precision world position
  Vec3 up;           // unit outward direction used for detail displacement
  double elevation;  // signed height above the reference surface
};

// The surface a quadtree is laid over: a six-face planet or a single flat face.
// Implementations are immutable and safe to share across threads.
class Terrain {
 public:
  virtual ~Terrain() = default;

  virtual Topology topology() const = 0;
  virtual int max_depth() const = 0;
  // Characteristic length: base radius for planets, extent for flat terrain.
  virtual double scale() const = 0;
  // Bound on |elevation| + |detail displacement| anywhere on the surface.
  virtual double relief_bound() const = 0;
  virtual const NoiseSpec& detail_noise() const = 0;

  // Point on the undisplaced reference surface.
  virtual Vec3 base_point(const FacePoint& p) const = 0;
  // Sample at a point; callers pass canonical points for cross-face agreement.
  virtual SurfaceSample sample(const FacePoint& p) const = 0;
  // Ownership-canonical form of p (identity for flat terrain).
  virtual FacePoint canonical(const FacePoint& p) const = 0;
};

class PlanetTerrain final : public Terrain {
 public:
  explicit PlanetTerrain(PlanetSpec spec);

  const PlanetSpec& spec() const noexcept { return spec_; }

  Topology topology() const override { return Topology::Cube; }
  int max_depth() const override { return spec_.max_depth; }
  double scale() const override { return spec_.base_radius; }
  double relief_bound() const override;
  const NoiseSpec& detail_noise() const override { return spec_.detail_noise; }
  Vec3 base_point(const FacePoint& p) const override;
  SurfaceSample sample(const FacePoint& p) const override;
  FacePoint canonical(const FacePoint& p) const override { return canonicalize(p); }

 private:
  PlanetSpec spec_;
};

// Square terrain over [0, extent]^2 in the xy plane, z up. Elevation comes
// from a heightfield when one is given, otherwise from the elevation noise.
struct FlatSpec {
  double extent = 1000.0;
  NoiseSpec elevation_noise{};
  NoiseSpec detail_noise{.seed = 1, .octaves = 4, .frequency = 1.0, .amplitude = 0.0};
  int max_depth = 5;
  std::optional<HeightField> heightfield;

  void validate() const;
};

// Flat terrain lives on a single quadtree root; this is its face tag.
inline constexpr Face kFlatFace = Face::PosZ;

class FlatTerrain final : public Terrain {
 public:
  explicit FlatTerrain(FlatSpec spec);

  const FlatSpec& spec() const noexcept { return spec_; }

  Topology topology() const override { return Topology::Flat; }
  int max_depth() const override { return spec_.max_depth; }
  double scale() const override { return spec_.extent; }
  double relief_bound() const override { return relief_; }
  const NoiseSpec& detail_noise() const override { return spec_.detail_noise; }
  Vec3 base_point(const FacePoint& p) const override;
  SurfaceSample sample(const FacePoint& p) const override;
  FacePoint canonical(const FacePoint& p) const override { return p; }

 private:
  FlatSpec spec_;
  double relief_ = 0.0;
};

}  // namespace planetforge
