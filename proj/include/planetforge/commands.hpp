#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "planetforge/config.hpp"
#include "planetforge/error.hpp"
#include "planetforge/lodtree.hpp"

namespace planetforge {

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitUsage = 2 };

// Bad command-line input (as opposed to a bad config file).
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::ordered_json report;
};

// Parses "x,y,z" (camera looks at the origin) or "x,y,z,fx,fy,fz".
CameraState parse_camera_arg(const std::string& text);

// One CameraState JSON object per non-blank line.
std::vector<CameraState> read_trajectory(const std::filesystem::path& path);

CommandResult cmd_gen_heightmap(const RunConfig& cfg, const std::filesystem::path& out);

struct GenPlanetOptions {
  std::filesystem::path mesh_path;
  std::filesystem::path report_path;
  std::optional<MeshFormat> format;  // defaults to the config's export format
  bool include_timing = true;
};

CommandResult cmd_gen_planet(const RunConfig& cfg, const CameraState& camera,
                             const GenPlanetOptions& options);

struct FlythroughOptions {
  std::filesystem::path out_dir;
  bool emit_meshes = false;
  bool include_timing = true;
};

// Writes out_dir/frames.jsonl, plus out_dir/frame_NNNNN.<ext> with emit_meshes.
CommandResult cmd_flythrough(const RunConfig& cfg, const std::vector<CameraState>& trajectory,
                             const FlythroughOptions& options);

// Audits a mesh file, or the mesh a gen-planet report points to. Closedness is
// required for planet reports and, for bare meshes, unless allow_open is set.
CommandResult cmd_validate(const std::filesystem::path& path, bool allow_open = false);

// Maps an exception to its exit code and the stderr error document.
CommandResult error_result(const std::exception& e);

}  // namespace planetforge
