#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "planetforge/tessellator.hpp"

namespace planetforge {

enum class MeshFormat { Obj, Ply };

MeshFormat mesh_format_from_name(const std::string& name);

// Wavefront OBJ with per-vertex colors ("v x y z r g b"), normals and faces.
// Float text uses shortest round-trip formatting, so output is byte-stable.
std::string to_obj(const IndexedMesh& mesh);
void write_obj(const IndexedMesh& mesh, const std::filesystem::path& path);

// Binary little-endian PLY: position, normal, uchar color and triplanar
// weights (tri_wx, tri_wy, tri_wz) per vertex.
std::string to_ply(const IndexedMesh& mesh);
void write_ply(const IndexedMesh& mesh, const std::filesystem::path& path);

void write_mesh(const IndexedMesh& mesh, const std::filesystem::path& path, MeshFormat format);

// Geometry read back for auditing.
struct MeshData {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
};

// Reads OBJ (polygons are fan-triangulated) or binary little-endian / ASCII
// PLY, chosen by file signature. Throws FormatError.
MeshData read_mesh(const std::filesystem::path& path);

}  // namespace planetforge
