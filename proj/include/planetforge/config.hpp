#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "planetforge/heightfield.hpp"
#include "planetforge/lodtree.hpp"
#include "planetforge/mesh_io.hpp"
#include "planetforge/shading.hpp"
#include "planetforge/spheremap.hpp"

namespace planetforge {

inline constexpr int kConfigSchema = 1;

enum class TerrainKind { Planet, Flat };

struct FlatConfig {
  double extent = 1000.0;
  int max_depth = 5;
  NoiseSpec elevation_noise{.seed = 0, .octaves = 6, .frequency = 0.004, .amplitude = 60.0};
  NoiseSpec detail_noise{.seed = 1, .octaves = 3, .frequency = 0.5, .amplitude = 0.0};
  // Optional 16-bit heightmap (with sidecar) replacing the elevation noise.
  std::optional<std::string> heightmap;
};

struct HeightmapConfig {
  enum class Source { Fbm, DiamondSquare };
  Source source = Source::Fbm;
  NoiseSpec noise{.seed = 0, .octaves = 6, .frequency = 0.004, .amplitude = 1.0};
  DiamondSquareParams diamond_square{};
  int width = 1025;
  int height = 1025;
  double horizontal_extent = 1000.0;
  double vertical_scale = 1.0;
  ImageFormat format = ImageFormat::Pgm16;
};

struct ExportConfig {
  MeshFormat format = MeshFormat::Obj;
  bool frustum_cull = false;
  double aspect_ratio = 16.0 / 9.0;
  // Rebase positions to the camera (true) or keep world coordinates.
  bool rebase_to_camera = true;
};

struct ShadingConfig {
  ColorRamp ramp{};
  Vec3 light_dir{-1.0, -0.3, -0.2};
  ShadingParams params{};
};

struct OutputConfig {
  std::string mesh = "planet.obj";
  std::string report = "report.json";
  std::string heightmap = "heightmap.pgm";
};

struct RunConfig {
  int schema = kConfigSchema;
  TerrainKind terrain = TerrainKind::Planet;
  PlanetSpec planet{};
  FlatConfig flat{};
  LodConfig lod{};
  ShadingConfig shading{};
  int inner_level = 4;
  ExportConfig export_options{};
  OutputConfig output{};
  HeightmapConfig heightmap{};
  std::optional<CameraState> camera;

  // Checks every nested invariant; throws ConfigError.
  void validate() const;
};

// Strict parse: unknown fields and wrong types are rejected. Missing fields
// keep their defaults. lod.max_depth defaults to the terrain's max_depth and
// must agree with it when both are given.
RunConfig parse_run_config(const nlohmann::json& j);
// A relative flat.heightmap path is resolved against the config file directory.
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);

// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

// --seed: every noise seed derives from `seed`.
void apply_seed_override(RunConfig& cfg, std::uint64_t seed);

NoiseSpec parse_noise_spec(const nlohmann::json& j, const std::string& path = "noise");
nlohmann::ordered_json to_json(const NoiseSpec& spec);

// PlanetSpec documents carry "schema": 1.
PlanetSpec parse_planet_spec(const nlohmann::json& j, const std::string& path = "planet");
nlohmann::ordered_json to_json(const PlanetSpec& spec);

CameraState parse_camera(const nlohmann::json& j, const std::string& path = "camera");
nlohmann::ordered_json to_json(const CameraState& cam);

}  // namespace planetforge
