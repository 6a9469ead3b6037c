#include "planetforge/config.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>

#include "planetforge/error.hpp"

namespace planetforge {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Tracks which keys of a JSON object were consumed so leftovers can be
// reported as unknown fields.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      const auto x = v->get<long long>();
      if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(at(key), "integer out of range");
      out = static_cast<int>(x);
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_integer() && v->get<long long>() >= 0) {
        out = static_cast<std::uint64_t>(v->get<long long>());
      } else {
        throw ConfigError(at(key), "expected a non-negative integer");
      }
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key), "expected a boolean");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, Vec3& out) {
    if (const json* v = find(key)) out = vec3(*v, at(key));
  }
  void get(const char* key, Rgb& out) {
    if (const json* v = find(key)) {
      const Vec3 c = vec3(*v, at(key));
      out = {c.x, c.y, c.z};
    }
  }

  static Vec3 vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
    for (const auto& x : v)
      if (!x.is_number()) throw ConfigError(path, "expected an array of 3 numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError(at(key.c_str()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};


template <typename Fn>
void wrap_invalid(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

ordered_json vec_json(Vec3 v) { return ordered_json::array({v.x, v.y, v.z}); }
ordered_json rgb_json(const Rgb& c) { return ordered_json::array({c[0], c[1], c[2]}); }

ColorRamp parse_ramp(const json& j, const std::string& path, ColorRamp ramp) {
  Fields f(j, path);
  if (const json* knots = f.find("knots")) {
    if (!knots->is_array()) throw ConfigError(f.at("knots"), "expected an array");
    ramp.knots.clear();
    for (std::size_t i = 0; i < knots->size(); ++i) {
      const std::string kp = f.at("knots") + "[" + std::to_string(i) + "]";
      Fields kf((*knots)[i], kp);
      RampKnot knot;
      kf.get("at", knot.at);
      kf.get("color", knot.color);
      kf.finish();
      ramp.knots.push_back(knot);
    }
  }
  f.get("slope_rock_threshold", ramp.slope_rock_threshold);
  f.get("rock_color", ramp.rock_color);
  f.finish();
  return ramp;
}

ImageFormat image_format(const std::string& name, const std::string& path) {
  if (name == "pgm16") return ImageFormat::Pgm16;
  if (name == "png16") return ImageFormat::Png16;
  throw ConfigError(path, "expected \"pgm16\" or \"png16\"");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

NoiseSpec parse_noise(const json& j, const std::string& path, NoiseSpec spec) {
  Fields f(j, path);
  f.get("seed", spec.seed);
  f.get("octaves", spec.octaves);
  f.get("lacunarity", spec.lacunarity);
  f.get("gain", spec.gain);
  f.get("frequency", spec.frequency);
  f.get("amplitude", spec.amplitude);
  f.finish();
  wrap_invalid(path, [&] { spec.validate(); });
  return spec;
}

PlanetSpec parse_planet(const json& j, const std::string& path, PlanetSpec spec, bool require_schema) {
  Fields f(j, path);
  int schema = kConfigSchema;
  const bool has_schema = f.find("schema") != nullptr;
  f.get("schema", schema);
  if (require_schema && !has_schema) throw ConfigError(f.at("schema"), "missing (expected 1)");
  if (schema != kConfigSchema) throw ConfigError(f.at("schema"), "unsupported schema version");
  f.get("base_radius", spec.base_radius);
  f.get("oblateness", spec.oblateness);
  f.get("max_depth", spec.max_depth);
  if (const json* n = f.find("elevation_noise"))
    spec.elevation_noise = parse_noise(*n, f.at("elevation_noise"), spec.elevation_noise);
  if (const json* n = f.find("detail_noise"))
    spec.detail_noise = parse_noise(*n, f.at("detail_noise"), spec.detail_noise);
  f.finish();
  wrap_invalid(path, [&] { spec.validate(); });
  return spec;
}

}  // namespace

NoiseSpec parse_noise_spec(const json& j, const std::string& path) {
  return parse_noise(j, path, NoiseSpec{});
}

ordered_json to_json(const NoiseSpec& spec) {
  ordered_json j;
  j["seed"] = spec.seed;
  j["octaves"] = spec.octaves;
  j["lacunarity"] = spec.lacunarity;
  j["gain"] = spec.gain;
  j["frequency"] = spec.frequency;
  j["amplitude"] = spec.amplitude;
  return j;
}

PlanetSpec parse_planet_spec(const json& j, const std::string& path) {
  return parse_planet(j, path, PlanetSpec{}, true);
}

ordered_json to_json(const PlanetSpec& spec) {
  ordered_json j;
  j["schema"] = kConfigSchema;
  j["base_radius"] = spec.base_radius;
  j["oblateness"] = spec.oblateness;
  j["max_depth"] = spec.max_depth;
  j["elevation_noise"] = to_json(spec.elevation_noise);
  j["detail_noise"] = to_json(spec.detail_noise);
  return j;
}

CameraState parse_camera(const json& j, const std::string& path) {
  Fields f(j, path);
  Vec3 position;
  if (f.find("position") == nullptr) throw ConfigError(f.at("position"), "missing");
  f.get("position", position);
  CameraState cam = CameraState::looking_at_origin(position);
  f.get("forward", cam.forward);
  f.get("up", cam.up);
  f.finish();
  wrap_invalid(path, [&] { cam.validate(); });
  return cam;
}

ordered_json to_json(const CameraState& cam) {
  ordered_json j;
  j["position"] = vec_json(cam.position);
  j["forward"] = vec_json(cam.forward);
  j["up"] = vec_json(cam.up);
  return j;
}

void RunConfig::validate() const {
  if (schema != kConfigSchema) throw ConfigError("schema", "unsupported schema version");
  wrap_invalid("planet", [&] { planet.validate(); });
  wrap_invalid("flat", [&] {
    if (!(flat.extent > 0.0)) throw InvalidArgument("extent must be > 0");
    if (flat.max_depth < 0 || flat.max_depth > kMaxLevel) throw InvalidArgument("max_depth must be in [0, 24]");
    flat.elevation_noise.validate();
    flat.detail_noise.validate();
  });
  wrap_invalid("lod", [&] { lod.validate(); });
  wrap_invalid("shading", [&] {
    shading.ramp.validate();
    shading.params.validate();
    if (!is_finite(shading.light_dir) || length(shading.light_dir) == 0.0)
      throw InvalidArgument("light_dir must be a non-zero vector");
  });
  if (inner_level < 0 || inner_level > kMaxInnerLevel)
    throw ConfigError("inner_level", "must be in [0, 6]");
  if (!(export_options.aspect_ratio > 0.0)) throw ConfigError("export.aspect_ratio", "must be > 0");
  wrap_invalid("heightmap", [&] {
    heightmap.noise.validate();
    if (!(heightmap.horizontal_extent > 0.0)) throw InvalidArgument("horizontal_extent must be > 0");
    if (!(heightmap.vertical_scale > 0.0)) throw InvalidArgument("vertical_scale must be > 0");
  });
  if (camera) wrap_invalid("camera", [&] { camera->validate(); });
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  Fields f(j, "");
  if (f.find("schema") == nullptr) throw ConfigError("schema", "missing (expected 1)");
  f.get("schema", cfg.schema);
  if (cfg.schema != kConfigSchema) throw ConfigError("schema", "unsupported schema version");

  std::string terrain = "planet";
  f.get("terrain", terrain);
  if (terrain == "planet")
    cfg.terrain = TerrainKind::Planet;
  else if (terrain == "flat")
    cfg.terrain = TerrainKind::Flat;
  else
    throw ConfigError("terrain", "expected \"planet\" or \"flat\"");

  if (const json* p = f.find("planet")) cfg.planet = parse_planet(*p, "planet", cfg.planet, false);

  if (const json* p = f.find("flat")) {
    Fields ff(*p, "flat");
    ff.get("extent", cfg.flat.extent);
    ff.get("max_depth", cfg.flat.max_depth);
    if (const json* n = ff.find("elevation_noise"))
      cfg.flat.elevation_noise = parse_noise(*n, "flat.elevation_noise", cfg.flat.elevation_noise);
    if (const json* n = ff.find("detail_noise"))
      cfg.flat.detail_noise = parse_noise(*n, "flat.detail_noise", cfg.flat.detail_noise);
    std::string hm;
    if (ff.find("heightmap") != nullptr) {
      ff.get("heightmap", hm);
      cfg.flat.heightmap = hm;
    }
    ff.finish();
  }
  const int terrain_depth = cfg.terrain == TerrainKind::Planet ? cfg.planet.max_depth : cfg.flat.max_depth;

  cfg.lod.max_depth = terrain_depth;
  if (const json* p = f.find("lod")) {
    Fields lf(*p, "lod");
    lf.get("split_threshold", cfg.lod.split_threshold);
    const bool has_depth = lf.find("max_depth") != nullptr;
    lf.get("max_depth", cfg.lod.max_depth);
    lf.get("viewport_height_px", cfg.lod.viewport_height_px);
    lf.get("vertical_fov", cfg.lod.vertical_fov);
    lf.finish();
    if (has_depth && cfg.lod.max_depth != terrain_depth)
      throw ConfigError("lod.max_depth", "must equal the terrain max_depth (" +
                                             std::to_string(terrain_depth) + ")");
  }

  if (const json* p = f.find("shading")) {
    Fields sf(*p, "shading");
    if (const json* r = sf.find("ramp")) cfg.shading.ramp = parse_ramp(*r, "shading.ramp", cfg.shading.ramp);
    sf.get("light_dir", cfg.shading.light_dir);
    sf.get("ambient_floor", cfg.shading.params.ambient_floor);
    sf.get("sharpness", cfg.shading.params.sharpness);
    if (const json* r = sf.find("elevation_range")) {
      const Vec3 tmp = r->is_array() && r->size() == 2
                           ? Vec3{(*r)[0].is_number() ? (*r)[0].get<double>() : NAN,
                                  (*r)[1].is_number() ? (*r)[1].get<double>() : NAN, 0.0}
                           : Vec3{NAN, NAN, 0.0};
      if (!std::isfinite(tmp.x) || !std::isfinite(tmp.y))
        throw ConfigError("shading.elevation_range", "expected [min, max]");
      cfg.shading.params.elevation_range = {tmp.x, tmp.y};
    }
    sf.finish();
  }

  f.get("inner_level", cfg.inner_level);

  if (const json* p = f.find("export")) {
    Fields ef(*p, "export");
    std::string format = "obj";
    ef.get("format", format);
    wrap_invalid("export.format", [&] { cfg.export_options.format = mesh_format_from_name(format); });
    ef.get("frustum_cull", cfg.export_options.frustum_cull);
    ef.get("aspect_ratio", cfg.export_options.aspect_ratio);
    ef.get("rebase_to_camera", cfg.export_options.rebase_to_camera);
    ef.finish();
  }

  if (const json* p = f.find("output")) {
    Fields of(*p, "output");
    of.get("mesh", cfg.output.mesh);
    of.get("report", cfg.output.report);
    of.get("heightmap", cfg.output.heightmap);
    of.finish();
  }

  if (const json* p = f.find("heightmap")) {
    Fields hf(*p, "heightmap");
    std::string source = "fbm";
    hf.get("source", source);
    if (source == "fbm")
      cfg.heightmap.source = HeightmapConfig::Source::Fbm;
    else if (source == "diamond_square")
      cfg.heightmap.source = HeightmapConfig::Source::DiamondSquare;
    else
      throw ConfigError("heightmap.source", "expected \"fbm\" or \"diamond_square\"");
    if (const json* n = hf.find("noise")) cfg.heightmap.noise = parse_noise(*n, "heightmap.noise", cfg.heightmap.noise);
    if (const json* d = hf.find("diamond_square")) {
      Fields df(*d, "heightmap.diamond_square");
      df.get("size_exponent", cfg.heightmap.diamond_square.size_exponent);
      if (const json* c = df.find("corners")) {
        if (!c->is_array() || c->size() != 4)
          throw ConfigError("heightmap.diamond_square.corners", "expected 4 numbers");
        for (std::size_t i = 0; i < 4; ++i) {
          if (!(*c)[i].is_number()) throw ConfigError("heightmap.diamond_square.corners", "expected 4 numbers");
          cfg.heightmap.diamond_square.corners[i] = (*c)[i].get<double>();
        }
      }
      df.get("roughness", cfg.heightmap.diamond_square.roughness);
      df.get("seed", cfg.heightmap.diamond_square.seed);
      df.finish();
      const int side = (1 << std::clamp(cfg.heightmap.diamond_square.size_exponent, 1, 12)) + 1;
      cfg.heightmap.width = side;
      cfg.heightmap.height = side;
    }
    hf.get("width", cfg.heightmap.width);
    hf.get("height", cfg.heightmap.height);
    hf.get("horizontal_extent", cfg.heightmap.horizontal_extent);
    hf.get("vertical_scale", cfg.heightmap.vertical_scale);
    std::string format = "pgm16";
    hf.get("format", format);
    cfg.heightmap.format = image_format(format, "heightmap.format");
    hf.finish();
  }

  if (const json* p = f.find("camera")) cfg.camera = parse_camera(*p, "camera");
  f.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("malformed JSON in ") + path.string() + ": " + e.what());
  }
  RunConfig cfg = parse_run_config(j);
  if (cfg.flat.heightmap) {
    const std::filesystem::path hm(*cfg.flat.heightmap);
    if (hm.is_relative()) cfg.flat.heightmap = (path.parent_path() / hm).lexically_normal().string();
  }
  return cfg;
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["schema"] = cfg.schema;
  j["terrain"] = cfg.terrain == TerrainKind::Planet ? "planet" : "flat";
  j["planet"] = to_json(cfg.planet);
  ordered_json flat;
  flat["extent"] = cfg.flat.extent;
  flat["max_depth"] = cfg.flat.max_depth;
  flat["elevation_noise"] = to_json(cfg.flat.elevation_noise);
  flat["detail_noise"] = to_json(cfg.flat.detail_noise);
  if (cfg.flat.heightmap) flat["heightmap"] = *cfg.flat.heightmap;
  j["flat"] = flat;
  ordered_json lod;
  lod["split_threshold"] = cfg.lod.split_threshold;
  lod["max_depth"] = cfg.lod.max_depth;
  lod["viewport_height_px"] = cfg.lod.viewport_height_px;
  lod["vertical_fov"] = cfg.lod.vertical_fov;
  j["lod"] = lod;
  ordered_json shading;
  ordered_json ramp;
  ordered_json knots = ordered_json::array();
  for (const auto& k : cfg.shading.ramp.knots) knots.push_back({{"at", k.at}, {"color", rgb_json(k.color)}});
  ramp["knots"] = knots;
  ramp["slope_rock_threshold"] = cfg.shading.ramp.slope_rock_threshold;
  ramp["rock_color"] = rgb_json(cfg.shading.ramp.rock_color);
  shading["ramp"] = ramp;
  shading["light_dir"] = vec_json(cfg.shading.light_dir);
  shading["ambient_floor"] = cfg.shading.params.ambient_floor;
  shading["sharpness"] = cfg.shading.params.sharpness;
  shading["elevation_range"] = {cfg.shading.params.elevation_range.first,
                                cfg.shading.params.elevation_range.second};
  j["shading"] = shading;
  j["inner_level"] = cfg.inner_level;
  ordered_json ex;
  ex["format"] = cfg.export_options.format == MeshFormat::Obj ? "obj" : "ply";
  ex["frustum_cull"] = cfg.export_options.frustum_cull;
  ex["aspect_ratio"] = cfg.export_options.aspect_ratio;
  ex["rebase_to_camera"] = cfg.export_options.rebase_to_camera;
  j["export"] = ex;
  j["output"] = {{"mesh", cfg.output.mesh}, {"report", cfg.output.report}, {"heightmap", cfg.output.heightmap}};
  ordered_json hm;
  hm["source"] = cfg.heightmap.source == HeightmapConfig::Source::Fbm ? "fbm" : "diamond_square";
  hm["noise"] = to_json(cfg.heightmap.noise);
  const auto& ds = cfg.heightmap.diamond_square;
  hm["diamond_square"] = {{"size_exponent", ds.size_exponent},
                          {"corners", {ds.corners[0], ds.corners[1], ds.corners[2], ds.corners[3]}},
                          {"roughness", ds.roughness},
                          {"seed", ds.seed}};
  hm["width"] = cfg.heightmap.width;
  hm["height"] = cfg.heightmap.height;
  hm["horizontal_extent"] = cfg.heightmap.horizontal_extent;
  hm["vertical_scale"] = cfg.heightmap.vertical_scale;
  hm["format"] = cfg.heightmap.format == ImageFormat::Pgm16 ? "pgm16" : "png16";
  j["heightmap"] = hm;
  if (cfg.camera) j["camera"] = to_json(*cfg.camera);
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(cfg).dump())));
  return buf;
}

void apply_seed_override(RunConfig& cfg, std::uint64_t seed) {
  const std::uint64_t detail = seed ^ 0xD6E8FEB86659FD93ULL;
  cfg.planet.elevation_noise.seed = seed;
  cfg.planet.detail_noise.seed = detail;
  cfg.flat.elevation_noise.seed = seed;
  cfg.flat.detail_noise.seed = detail;
  cfg.heightmap.noise.seed = seed;
  cfg.heightmap.diamond_square.seed = seed;
}

}  // namespace planetforge
