#include "planetforge/mesh_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "planetforge/error.hpp"

namespace planetforge {
namespace {

void append_float(std::string& out, float value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

void append_double(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

template <typename T>
void append_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

std::uint8_t to_byte(float c) {
  const float clamped = c < 0.0f ? 0.0f : (c > 1.0f ? 1.0f : c);
  return static_cast<std::uint8_t>(clamped * 255.0f + 0.5f);
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("path", "cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("path", "write failed for " + path.string());
}

std::string origin_comment(const IndexedMesh& mesh) {
  std::string s = "rebase_origin ";
  append_double(s, mesh.rebase_origin.x);
  s += ' ';
  append_double(s, mesh.rebase_origin.y);
  s += ' ';
  append_double(s, mesh.rebase_origin.z);
  return s;
}

// ---- readers -----------------------------------------------------------------

std::uint32_t obj_index(const std::string& token, std::size_t vertex_count) {
  const std::string head = token.substr(0, token.find('/'));
  long long idx = 0;
  const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (res.ec != std::errc() || idx == 0) throw FormatError("f", "bad face index '" + token + "'");
  if (idx < 0) idx += static_cast<long long>(vertex_count) + 1;
  if (idx < 1 || idx > static_cast<long long>(vertex_count))
    throw FormatError("f", "face index out of range '" + token + "'");
  return static_cast<std::uint32_t>(idx - 1);
}

MeshData read_obj(const std::string& text) {
  MeshData mesh;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        throw FormatError("v", "malformed vertex on line " + std::to_string(line_no));
      mesh.positions.push_back(p);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (ls >> tok) poly.push_back(obj_index(tok, mesh.positions.size()));
      if (poly.size() < 3) throw FormatError("f", "face with fewer than 3 vertices on line " + std::to_string(line_no));
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return mesh;
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  throw FormatError("property", "unknown PLY type '" + t + "'");
}

double ply_read_binary(const char* p, const std::string& t) {
  auto get = [p]<typename T>(T) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return get(std::int8_t{});
  if (t == "uchar" || t == "uint8") return get(std::uint8_t{});
  if (t == "short" || t == "int16") return get(std::int16_t{});
  if (t == "ushort" || t == "uint16") return get(std::uint16_t{});
  if (t == "int" || t == "int32") return get(std::int32_t{});
  if (t == "uint" || t == "uint32") return get(std::uint32_t{});
  if (t == "float" || t == "float32") return get(float{});
  return get(double{});
}

MeshData read_ply(const std::string& data) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    const std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) throw FormatError("header", "unterminated PLY header");
    std::string line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    return line;
  };

  if (next_line() != "ply") throw FormatError("magic", "not a PLY file");
  std::string format;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string line = next_line();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "end_header") break;
    if (tag == "format") {
      ls >> format;
    } else if (tag == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw FormatError("property", "property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = type;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    }
  }
  if (format != "binary_little_endian" && format != "ascii")
    throw FormatError("format", "unsupported PLY format '" + format + "'");
  const bool binary = format == "binary_little_endian";

  MeshData mesh;
  std::istringstream ascii(binary ? std::string() : data.substr(pos));
  auto read_value = [&](const std::string& type) -> double {
    if (!binary) {
      double v;
      if (!(ascii >> v)) throw FormatError("body", "truncated ASCII PLY body");
      return v;
    }
    const std::size_t size = ply_type_size(type);
    if (pos + size > data.size()) throw FormatError("body", "truncated binary PLY body");
    const double v = ply_read_binary(data.data() + pos, type);
    pos += size;
    return v;
  };

  for (const auto& e : elements) {
    for (std::size_t r = 0; r < e.count; ++r) {
      Vec3 p;
      for (const auto& prop : e.props) {
        if (prop.is_list) {
          const auto count = static_cast<std::size_t>(read_value(prop.count_type));
          std::vector<std::uint32_t> poly(count);
          for (auto& v : poly) v = static_cast<std::uint32_t>(read_value(prop.type));
          if (e.name == "face" && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            if (count < 3) throw FormatError("face", "face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < count; ++k) mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
          }
        } else {
          const double v = read_value(prop.type);
          if (e.name == "vertex") {
            if (prop.name == "x") p.x = v;
            else if (prop.name == "y") p.y = v;
            else if (prop.name == "z") p.z = v;
          }
        }
      }
      if (e.name == "vertex") mesh.positions.push_back(p);
    }
  }
  for (const auto& t : mesh.triangles)
    for (auto idx : t)
      if (idx >= mesh.positions.size()) throw FormatError("face", "vertex index out of range");
  return mesh;
}

}  // namespace

MeshFormat mesh_format_from_name(const std::string& name) {
  if (name == "obj") return MeshFormat::Obj;
  if (name == "ply") return MeshFormat::Ply;
  throw InvalidArgument("unknown mesh format '" + name + "' (expected obj or ply)");
}

std::string to_obj(const IndexedMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertex_count() * 96 + mesh.triangles.size() * 40);
  out += "# planetforge mesh\n# ";
  out += origin_comment(mesh);
  out += '\n';
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    out += "v ";
    for (int c = 0; c < 3; ++c) {
      append_float(out, mesh.positions[i][c]);
      out += ' ';
    }
    for (int c = 0; c < 3; ++c) {
      append_float(out, mesh.colors[i][c]);
      out += c < 2 ? ' ' : '\n';
    }
  }
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    out += "vn ";
    for (int c = 0; c < 3; ++c) {
      append_float(out, mesh.normals[i][c]);
      out += c < 2 ? ' ' : '\n';
    }
  }
  for (const Triangle& t : mesh.triangles) {
    out += 'f';
    for (std::uint32_t idx : t) {
      const std::string n = std::to_string(idx + 1);
      out += ' ';
      out += n;
      out += "//";
      out += n;
    }
    out += '\n';
  }
  return out;
}

void write_obj(const IndexedMesh& mesh, const std::filesystem::path& path) { write_file(path, to_obj(mesh)); }

std::string to_ply(const IndexedMesh& mesh) {
  std::string out = "ply\nformat binary_little_endian 1.0\ncomment planetforge mesh\ncomment ";
  out += origin_comment(mesh);
  out += "\nelement vertex " + std::to_string(mesh.vertex_count()) + "\n";
  out +=
      "property float x\nproperty float y\nproperty float z\n"
      "property float nx\nproperty float ny\nproperty float nz\n"
      "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      "property float tri_wx\nproperty float tri_wy\nproperty float tri_wz\n";
  out += "element face " + std::to_string(mesh.triangles.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    for (float v : mesh.positions[i]) append_le(out, v);
    for (float v : mesh.normals[i]) append_le(out, v);
    for (float v : mesh.colors[i]) append_le(out, to_byte(v));
    for (float v : mesh.triplanar[i]) append_le(out, v);
  }
  for (const Triangle& t : mesh.triangles) {
    append_le(out, std::uint8_t{3});
    for (std::uint32_t idx : t) append_le(out, static_cast<std::int32_t>(idx));
  }
  return out;
}

void write_ply(const IndexedMesh& mesh, const std::filesystem::path& path) { write_file(path, to_ply(mesh)); }

void write_mesh(const IndexedMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  if (format == MeshFormat::Obj)
    write_obj(mesh, path);
  else
    write_ply(mesh, path);
}

MeshData read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("path", "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.rfind("ply", 0) == 0) return read_ply(data);
  return read_obj(data);
}

}  // namespace planetforge
