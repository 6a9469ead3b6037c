#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "planetforge/commands.hpp"
#include "planetforge/config.hpp"
#include "planetforge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace planetforge;

namespace {

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string camera;
  std::string out;
  std::string trajectory;
  std::string target;
  bool frustum_cull = false;
  bool emit_meshes = false;
  bool no_timing = false;
  bool open = false;
};

RunConfig load(const Args& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (a.seed) apply_seed_override(cfg, *a.seed);
  if (a.frustum_cull) cfg.export_options.frustum_cull = true;
  cfg.validate();
  return cfg;
}

int emit(const CommandResult& r, std::ostream& stream) {
  stream << r.report.dump() << '\n';
  return r.exit_code;
}

int run(CLI::App& app, const Args& a) {
  if (app.got_subcommand("gen-heightmap")) {
    const RunConfig cfg = load(a);
    return emit(cmd_gen_heightmap(cfg, a.out.empty() ? fs::path(cfg.output.heightmap) : fs::path(a.out)),
                std::cout);
  }
  if (app.got_subcommand("gen-planet")) {
    const RunConfig cfg = load(a);
    const CameraState cam = a.camera.empty() ? default_camera(cfg) : parse_camera_arg(a.camera);
    GenPlanetOptions opts;
    opts.include_timing = !a.no_timing;
    if (a.out.empty()) {
      opts.mesh_path = cfg.output.mesh;
      opts.report_path = cfg.output.report;
    } else {
      opts.mesh_path = a.out;
      opts.report_path = fs::path(a.out).replace_extension(".report.json");
      const auto ext = opts.mesh_path.extension();
      if (ext == ".obj") opts.format = MeshFormat::Obj;
      if (ext == ".ply") opts.format = MeshFormat::Ply;
    }
    const CommandResult r = cmd_gen_planet(cfg, cam, opts);
    return emit(r, r.exit_code == kExitOk ? std::cout : std::cerr);
  }
  if (app.got_subcommand("flythrough")) {
    const RunConfig cfg = load(a);
    const auto trajectory = read_trajectory(a.trajectory);
    FlythroughOptions opts;
    opts.out_dir = a.out.empty() ? fs::path("flythrough") : fs::path(a.out);
    opts.emit_meshes = a.emit_meshes;
    opts.include_timing = !a.no_timing;
    return emit(cmd_flythrough(cfg, trajectory, opts), std::cout);
  }
  const CommandResult r = cmd_validate(a.target, a.open);
  return emit(r, r.exit_code == kExitOk ? std::cout : std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural planet and terrain generator with restricted quadtree LOD"};
  app.require_subcommand(1);
  Args a;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "Run config JSON")->check(CLI::ExistingFile);
    sub->add_option("--seed", a.seed, "Override every seed in the config");
    sub->add_option("--out", a.out, "Output path");
  };

  auto* hm = app.add_subcommand("gen-heightmap", "Write a 16-bit heightmap and its sidecar");
  add_common(hm);

  auto* gp = app.add_subcommand("gen-planet", "Export the LOD mesh seen from one camera, plus a report");
  add_common(gp);
  gp->add_option("--camera", a.camera, "x,y,z or x,y,z,fx,fy,fz");
  gp->add_flag("--frustum-cull", a.frustum_cull, "Drop patches outside the view cone");
  gp->add_flag("--no-timing", a.no_timing, "Omit wall-clock timings from the report");

  auto* fly = app.add_subcommand("flythrough", "Replay a JSONL camera trajectory and log frame stats");
  add_common(fly);
  fly->add_option("trajectory", a.trajectory, "JSONL file of camera states")->required();
  fly->add_flag("--frustum-cull", a.frustum_cull, "Drop patches outside the view cone");
  fly->add_flag("--emit-meshes", a.emit_meshes, "Write one mesh per frame");
  fly->add_flag("--no-timing", a.no_timing, "Omit wall-clock timings from frames.jsonl");

  auto* val = app.add_subcommand("validate", "Audit a mesh or gen-planet report for watertightness");
  val->add_option("path", a.target, "Mesh (.obj/.ply) or report (.json)")->required();
  val->add_flag("--open", a.open, "Accept boundary edges on a bare mesh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return run(app, a);
  } catch (const std::exception& e) {
    const CommandResult r = error_result(e);
    std::cerr << r.report.dump() << '\n';
    return r.exit_code;
  }
}
