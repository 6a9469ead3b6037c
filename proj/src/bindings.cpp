// Python extension module planetforge._core.
//
// Configs cross the boundary as JSON text; the Python package wraps these
// entry points so callers can pass plain dicts.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "planetforge/commands.hpp"
#include "planetforge/config.hpp"
#include "planetforge/error.hpp"
#include "planetforge/heightfield.hpp"
#include "planetforge/mesh_audit.hpp"
#include "planetforge/noise.hpp"
#include "planetforge/parallel.hpp"
#include "planetforge/pipeline.hpp"
#include "planetforge/shading.hpp"

namespace py = pybind11;
using namespace planetforge;

namespace {

RunConfig config_from(const std::string& text) { return parse_run_config(nlohmann::json::parse(text)); }

Vec3 vec3_from(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

CameraState camera_from(const RunConfig& cfg, const std::optional<std::array<double, 3>>& position) {
  return position ? CameraState::looking_at_origin(vec3_from(*position)) : default_camera(cfg);
}

template <typename T, std::size_t N, typename Src>
py::array_t<T> rows(const std::vector<Src>& src, const std::function<std::array<T, N>(const Src&)>& get) {
  py::array_t<T> out({static_cast<py::ssize_t>(src.size()), static_cast<py::ssize_t>(N)});
  auto view = out.template mutable_unchecked<2>();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto row = get(src[i]);
    for (std::size_t k = 0; k < N; ++k) view(i, k) = row[k];
  }
  return out;
}

py::array_t<double> cells_array(const HeightField& f) {
  py::array_t<double> out({f.height(), f.width()});
  std::memcpy(out.mutable_data(), f.cells().data(), f.cells().size() * sizeof(double));
  return out;
}

HeightField field_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a, double extent,
                             double vscale) {
  if (a.ndim() != 2) throw InvalidArgument("heightfield array must be 2-D");
  std::vector<double> cells(a.data(), a.data() + a.size());
  return HeightField(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(cells), extent, vscale);
}

py::dict mesh_dict(const Frame& frame, bool expect_closed) {
  const IndexedMesh& m = frame.mesh;
  py::dict d;
  d["world"] = rows<double, 3, Vec3>(m.world, [](const Vec3& v) { return std::array{v.x, v.y, v.z}; });
  d["positions"] = rows<float, 3, std::array<float, 3>>(m.positions, [](const auto& v) { return v; });
  d["normals"] = rows<float, 3, std::array<float, 3>>(m.normals, [](const auto& v) { return v; });
  d["colors"] = rows<float, 3, std::array<float, 3>>(m.colors, [](const auto& v) { return v; });
  d["triangles"] = rows<std::uint32_t, 3, Triangle>(m.triangles, [](const Triangle& t) { return t; });
  d["rebase_origin"] = std::array{m.rebase_origin.x, m.rebase_origin.y, m.rebase_origin.z};
  d["stats"] = frame.stats.to_json(false).dump();
  d["audit"] = audit_mesh(m).to_json(expect_closed).dump();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "planetforge native core";

  auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", invalid.ptr());
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<OutOfDomain>(m, "OutOfDomain", PyExc_IndexError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);

  m.def("set_worker_count", &set_worker_count, py::arg("n"));
  m.def("worker_count", &worker_count);

  m.def("perlin3", [](double x, double y, double z, std::uint64_t seed) { return perlin3({x, y, z}, seed); },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("seed"));
  m.def(
      "fbm3",
      [](double x, double y, double z, const std::string& spec) {
        return fbm3({x, y, z}, parse_noise_spec(nlohmann::json::parse(spec)));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("spec_json"));
  m.def(
      "octave_bound", [](const std::string& spec) { return parse_noise_spec(nlohmann::json::parse(spec)).octave_bound(); },
      py::arg("spec_json"));

  py::class_<HeightField>(m, "HeightField")
      .def(py::init(&field_from_array), py::arg("cells"), py::arg("horizontal_extent") = 1.0,
           py::arg("vertical_scale") = 1.0)
      .def_property_readonly("width", &HeightField::width)
      .def_property_readonly("height", &HeightField::height)
      .def_property_readonly("horizontal_extent", &HeightField::horizontal_extent)
      .def_property_readonly("vertical_scale", &HeightField::vertical_scale)
      .def("to_numpy", &cells_array)
      .def("range", &HeightField::range)
      .def("sample", &sample_bilinear, py::arg("u"), py::arg("v"))
      .def(
          "export",
          [](const HeightField& f, const std::filesystem::path& path, const std::string& format) {
            if (format != "pgm16" && format != "png16") throw InvalidArgument("format must be pgm16 or png16");
            export_heightfield(f, path, format == "pgm16" ? ImageFormat::Pgm16 : ImageFormat::Png16);
          },
          py::arg("path"), py::arg("format") = "pgm16")
      .def("__eq__", [](const HeightField& a, const HeightField& b) { return a == b; });

  m.def("import_heightfield", py::overload_cast<const std::filesystem::path&>(&import_heightfield), py::arg("path"));
  m.def("diamond_square", &diamond_square, py::arg("size_exponent"), py::arg("corners"), py::arg("roughness"),
        py::arg("seed"));
  m.def(
      "generate_fbm_heightfield",
      [](const std::string& spec, int width, int height, double extent) {
        return generate_heightfield(parse_noise_spec(nlohmann::json::parse(spec)), width, height, extent);
      },
      py::arg("spec_json"), py::arg("width"), py::arg("height"), py::arg("horizontal_extent"));

  m.def(
      "normalize_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
      py::arg("config_json"));
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(config_from(text)); }, py::arg("config_json"));

  m.def(
      "select_lod",
      [](const std::string& text, std::optional<std::array<double, 3>> position) {
        const RunConfig cfg = config_from(text);
        const auto terrain = make_terrain(cfg);
        const ActiveSet set = select_lod(camera_from(cfg, position), *terrain, cfg.lod);
        std::vector<std::tuple<int, int, std::uint32_t, std::uint32_t, std::array<int, 4>>> out;
        for (const ActiveKey& k : set.keys())
          out.emplace_back(static_cast<int>(k.key.face), k.key.level, k.key.i, k.key.j, k.neighbor_levels);
        return out;
      },
      py::arg("config_json"), py::arg("camera") = std::nullopt);

  m.def(
      "build_mesh",
      [](const std::string& text, std::optional<std::array<double, 3>> position) {
        const RunConfig cfg = config_from(text);
        const auto terrain = make_terrain(cfg);
        Frame frame;
        {
          py::gil_scoped_release release;
          frame = build_frame(camera_from(cfg, position), *terrain, cfg.lod, frame_options(cfg));
        }
        const bool expect_closed = cfg.terrain == TerrainKind::Planet && !cfg.export_options.frustum_cull;
        return mesh_dict(frame, expect_closed);
      },
      py::arg("config_json"), py::arg("camera") = std::nullopt);

  m.def(
      "validate_mesh",
      [](const std::filesystem::path& path, bool allow_open) {
        const CommandResult r = cmd_validate(path, allow_open);
        return std::make_pair(r.exit_code, r.report.dump());
      },
      py::arg("path"), py::arg("allow_open") = false);

  m.def(
      "triplanar_weights",
      [](const std::array<double, 3>& n, double sharpness) { return triplanar_weights(vec3_from(n), sharpness); },
      py::arg("normal"), py::arg("sharpness") = 4.0);
}
