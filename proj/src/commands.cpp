#include "planetforge/commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "planetforge/heightfield.hpp"
#include "planetforge/mesh_audit.hpp"
#include "planetforge/mesh_io.hpp"
#include "planetforge/pipeline.hpp"

namespace planetforge {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError("--camera: '" + std::string(text) + "' is not a number");
  return value;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string mesh_extension(MeshFormat f) { return f == MeshFormat::Obj ? ".obj" : ".ply"; }

ordered_json vec_json(Vec3 v) { return {v.x, v.y, v.z}; }

}  // namespace

CameraState parse_camera_arg(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    values.push_back(parse_number(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 3 && values.size() != 6)
    throw UsageError("--camera expects x,y,z or x,y,z,fx,fy,fz");
  const Vec3 pos{values[0], values[1], values[2]};
  CameraState cam = CameraState::looking_at_origin(pos);
  if (values.size() == 6) {
    cam.forward = normalize(Vec3{values[3], values[4], values[5]});
    Vec3 hint{0.0, 0.0, 1.0};
    if (std::abs(cam.forward.z) > 0.9) hint = {0.0, 1.0, 0.0};
    cam.up = normalize(hint - cam.forward * dot(hint, cam.forward));
  }
  try {
    cam.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("--camera: ") + e.what());
  }
  return cam;
}

std::vector<CameraState> read_trajectory(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trajectory " + path.string());
  std::vector<CameraState> frames;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw UsageError("trajectory line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      frames.push_back(parse_camera(row, "trajectory[" + std::to_string(lineno) + "]"));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (frames.empty()) throw UsageError("trajectory " + path.string() + " contains no camera rows");
  return frames;
}

CommandResult cmd_gen_heightmap(const RunConfig& cfg, const fs::path& out) {
  const HeightmapConfig& hc = cfg.heightmap;
  HeightField field = [&] {
    if (hc.source == HeightmapConfig::Source::Fbm)
      return generate_heightfield(hc.noise, hc.width, hc.height, hc.horizontal_extent);
    const int side = (1 << hc.diamond_square.size_exponent) + 1;
    return generate_heightfield(hc.diamond_square, side, side, hc.horizontal_extent);
  }();
  field = field.with_metadata(hc.horizontal_extent, hc.vertical_scale);
  ensure_parent(out);
  export_heightfield(field, out, hc.format);
  const auto [lo, hi] = field.range();
  CommandResult r;
  r.report["config_hash"] = config_hash(cfg);
  r.report["image"] = out.string();
  r.report["sidecar"] = sidecar_path(out).string();
  r.report["width"] = field.width();
  r.report["height"] = field.height();
  r.report["min"] = lo;
  r.report["max"] = hi;
  return r;
}

CommandResult cmd_gen_planet(const RunConfig& cfg, const CameraState& camera,
                             const GenPlanetOptions& options) {
  const auto terrain = make_terrain(cfg);
  const Frame frame = build_frame(camera, *terrain, cfg.lod, frame_options(cfg), 0);
  const MeshFormat format = options.format.value_or(cfg.export_options.format);
  write_mesh(frame.mesh, options.mesh_path, format);

  // A culled or flat mesh is open by construction.
  const bool expect_closed = cfg.terrain == TerrainKind::Planet && !cfg.export_options.frustum_cull;
  const MeshAudit audit = audit_mesh(frame.mesh);

  CommandResult r;
  r.report["config_hash"] = config_hash(cfg);
  r.report["mesh"] = options.mesh_path.filename().string();
  r.report["format"] = format == MeshFormat::Obj ? "obj" : "ply";
  r.report["rebase_origin"] = vec_json(frame.mesh.rebase_origin);
  r.report["expect_closed"] = expect_closed;
  r.report["frame"] = frame.stats.to_json(options.include_timing);
  r.report["audit"] = audit.to_json(expect_closed);
  r.report["config"] = to_json(cfg);
  write_text(options.report_path, r.report.dump(2) + "\n");
  r.exit_code = audit.passes(expect_closed) ? kExitOk : kExitInvariant;
  return r;
}

CommandResult cmd_flythrough(const RunConfig& cfg, const std::vector<CameraState>& trajectory,
                             const FlythroughOptions& options) {
  if (trajectory.empty()) throw UsageError("trajectory contains no camera rows");
  const auto terrain = make_terrain(cfg);
  const FrameOptions fo = frame_options(cfg);
  fs::create_directories(options.out_dir);
  const fs::path jsonl = options.out_dir / "frames.jsonl";
  std::ofstream out(jsonl, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + jsonl.string());

  CommandResult r;
  std::size_t total_triangles = 0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const Frame frame = build_frame(trajectory[i], *terrain, cfg.lod, fo, i);
    out << frame.stats.to_json(options.include_timing).dump() << '\n';
    if (options.emit_meshes) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%05zu", i);
      write_mesh(frame.mesh, options.out_dir / (name + mesh_extension(cfg.export_options.format)),
                 cfg.export_options.format);
    }
    total_triangles += frame.stats.triangles;
  }
  if (!out) throw std::runtime_error("write failed for " + jsonl.string());
  r.report["config_hash"] = config_hash(cfg);
  r.report["frames"] = trajectory.size();
  r.report["stats"] = jsonl.string();
  r.report["total_triangles"] = total_triangles;
  return r;
}

CommandResult cmd_validate(const fs::path& path, bool allow_open) {
  fs::path mesh_path = path;
  bool expect_closed = !allow_open;
  CommandResult r;
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open report " + path.string());
    json report;
    try {
      in >> report;
    } catch (const json::exception& e) {
      throw FormatError("report", std::string("malformed report JSON: ") + e.what());
    }
    if (!report.contains("mesh") || !report["mesh"].is_string())
      throw FormatError("mesh", "report has no mesh path");
    mesh_path = fs::path(report["mesh"].get<std::string>());
    if (mesh_path.is_relative()) mesh_path = path.parent_path() / mesh_path;
    if (report.contains("expect_closed") && report["expect_closed"].is_boolean())
      expect_closed = report["expect_closed"].get<bool>();
    if (report.contains("config_hash")) r.report["config_hash"] = report["config_hash"];
  }
  if (!fs::exists(mesh_path)) throw UsageError("no such mesh " + mesh_path.string());
  const MeshData mesh = read_mesh(mesh_path);
  const MeshAudit audit = audit_mesh(mesh.positions, mesh.triangles);
  r.report["mesh"] = mesh_path.string();
  r.report["expect_closed"] = expect_closed;
  r.report["audit"] = audit.to_json(expect_closed);
  r.exit_code = audit.passes(expect_closed) ? kExitOk : kExitInvariant;
  return r;
}

CommandResult error_result(const std::exception& e) {
  CommandResult r;
  std::string kind = "internal";
  std::optional<std::string> field;
  r.exit_code = kExitInvariant;
  if (dynamic_cast<const UsageError*>(&e)) {
    kind = "usage";
    r.exit_code = kExitUsage;
  } else if (dynamic_cast<const ConfigError*>(&e)) {
    kind = "config";
    r.exit_code = kExitUsage;
  } else if (const auto* fe = dynamic_cast<const FormatError*>(&e)) {
    kind = "format";
    r.exit_code = kExitUsage;
    field = fe->field();
  } else if (dynamic_cast<const InvalidArgument*>(&e)) {
    kind = "invalid_argument";
    r.exit_code = kExitUsage;
  } else if (dynamic_cast<const ConsistencyError*>(&e)) {
    kind = "consistency";
  } else if (dynamic_cast<const OutOfDomain*>(&e)) {
    kind = "out_of_domain";
  }
  r.report["error"]["kind"] = kind;
  r.report["error"]["message"] = e.what();
  if (field) r.report["error"]["field"] = *field;
  return r;
}

}  // namespace planetforge
