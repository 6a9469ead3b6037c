#include "planetforge/heightfield.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "planetforge/error.hpp"
#include "planetforge/parallel.hpp"

namespace planetforge {
namespace {

constexpr int kMinSide = 2;
constexpr int kMaxSide = 8193;
constexpr double kQuantMax = 65535.0;

void check_metadata(double horizontal_extent, double vertical_scale) {
  if (!(horizontal_extent > 0.0) || !std::isfinite(horizontal_extent))
    throw InvalidArgument("heightfield: horizontal_extent must be > 0");
  if (!(vertical_scale > 0.0) || !std::isfinite(vertical_scale))
    throw InvalidArgument("heightfield: vertical_scale must be > 0");
}

// ---- PGM -------------------------------------------------------------------

void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& words) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("path", "cannot open " + path.string() + " for writing");
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  std::vector<unsigned char> bytes(words.size() * 2);
  for (std::size_t i = 0; i < words.size(); ++i) {
    bytes[2 * i] = static_cast<unsigned char>(words[i] >> 8);
    bytes[2 * i + 1] = static_cast<unsigned char>(words[i] & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("path", "write failed for " + path.string());
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string pgm_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

int parse_header_int(const std::string& token, const char* field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError(field, "malformed PGM header value '" + token + "'");
  }
}

std::vector<std::uint16_t> read_pgm16(const std::string& data, int& width, int& height) {
  std::size_t pos = 0;
  if (pgm_token(data, pos) != "P5") throw FormatError("magic", "not a binary PGM (P5) file");
  width = parse_header_int(pgm_token(data, pos), "width");
  height = parse_header_int(pgm_token(data, pos), "height");
  const int maxval = parse_header_int(pgm_token(data, pos), "maxval");
  if (maxval != 65535)
    throw FormatError("bit_depth", "expected 16-bit PGM (maxval 65535), got maxval " +
                                       std::to_string(maxval));
  if (width < kMinSide || height < kMinSide || width > kMaxSide || height > kMaxSide)
    throw FormatError("width", "image dimensions out of range");
  ++pos;  // single whitespace byte after maxval
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (data.size() < pos + 2 * count) throw FormatError("pixels", "truncated PGM pixel data");
  std::vector<std::uint16_t> words(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto hi = static_cast<unsigned char>(data[pos + 2 * i]);
    const auto lo = static_cast<unsigned char>(data[pos + 2 * i + 1]);
    words[i] = static_cast<std::uint16_t>(hi << 8 | lo);
  }
  return words;
}

// ---- PNG -------------------------------------------------------------------

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; these wrappers keep only trivially
// destructible state live across setjmp and translate failure to a flag.
bool png_write_rows(std::FILE* fp, int width, int height, png_bytep* rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png16(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& words) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw FormatError("path", "cannot open " + path.string() + " for writing");
  std::vector<png_byte> bytes(words.size() * 2);
  for (std::size_t i = 0; i < words.size(); ++i) {
    bytes[2 * i] = static_cast<png_byte>(words[i] >> 8);
    bytes[2 * i + 1] = static_cast<png_byte>(words[i] & 0xFF);
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r)
    rows[static_cast<std::size_t>(r)] = bytes.data() + static_cast<std::size_t>(r) * width * 2;
  if (!png_write_rows(fp.get(), width, height, rows.data()))
    throw FormatError("pixels", "libpng failed writing " + path.string());
}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int interlace = 0;
};

enum class PngReadStatus { Ok, Corrupt, WrongFormat };

PngReadStatus png_read_gray16(std::FILE* fp, PngHeader& header, std::vector<png_byte>& bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return PngReadStatus::Corrupt;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return PngReadStatus::Corrupt;
  }
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngReadStatus::Corrupt;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_get_IHDR(png, info, &header.width, &header.height, &header.bit_depth, &header.color_type,
               &header.interlace, nullptr, nullptr);
  if (header.bit_depth != 16 || header.color_type != PNG_COLOR_TYPE_GRAY ||
      header.interlace != PNG_INTERLACE_NONE || header.width < kMinSide ||
      header.height < kMinSide || header.width > kMaxSide || header.height > kMaxSide) {
    png_destroy_read_struct(&png, &info, nullptr);
    return PngReadStatus::WrongFormat;
  }
  bytes.assign(static_cast<std::size_t>(header.width) * header.height * 2, 0);
  rows.resize(header.height);
  for (png_uint_32 r = 0; r < header.height; ++r)
    rows[r] = bytes.data() + static_cast<std::size_t>(r) * header.width * 2;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return PngReadStatus::Ok;
}

std::vector<std::uint16_t> read_png16(const std::filesystem::path& path, int& width,
                                      int& height) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw FormatError("path", "cannot open " + path.string());
  PngHeader header;
  std::vector<png_byte> bytes;
  switch (png_read_gray16(fp.get(), header, bytes)) {
    case PngReadStatus::Corrupt:
      throw FormatError("pixels", "corrupt PNG " + path.string());
    case PngReadStatus::WrongFormat:
      if (header.bit_depth != 16)
        throw FormatError("bit_depth", "expected 16-bit PNG, got " +
                                           std::to_string(header.bit_depth) + "-bit");
      if (header.color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError("color_type", "expected single-channel grayscale PNG");
      if (header.interlace != PNG_INTERLACE_NONE)
        throw FormatError("interlace", "interlaced PNG is not supported");
      throw FormatError("width", "image dimensions out of range");
    case PngReadStatus::Ok:
      break;
  }
  width = static_cast<int>(header.width);
  height = static_cast<int>(header.height);
  std::vector<std::uint16_t> words(bytes.size() / 2);
  for (std::size_t i = 0; i < words.size(); ++i)
    words[i] = static_cast<std::uint16_t>(bytes[2 * i] << 8 | bytes[2 * i + 1]);
  return words;
}

// ---- sidecar -----------------------------------------------------------------

struct Sidecar {
  double min = 0.0;
  double max = 0.0;
  double horizontal_extent = 1.0;
  double vertical_scale = 1.0;
};

double sidecar_number(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw FormatError(field, "missing from heightmap sidecar");
  if (!j[field].is_number()) throw FormatError(field, "sidecar value is not a number");
  const double v = j[field].get<double>();
  if (!std::isfinite(v)) throw FormatError(field, "sidecar value is not finite");
  return v;
}

Sidecar read_sidecar(const std::filesystem::path& image) {
  const auto path = sidecar_path(image);
  std::ifstream in(path);
  if (!in) throw FormatError("sidecar", "missing sidecar " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("sidecar", std::string("malformed JSON: ") + e.what());
  }
  Sidecar s;
  s.min = sidecar_number(j, "min");
  s.max = sidecar_number(j, "max");
  s.horizontal_extent = sidecar_number(j, "horizontal_extent");
  s.vertical_scale = sidecar_number(j, "vertical_scale");
  if (s.max < s.min) throw FormatError("max", "sidecar max is below min");
  return s;
}

void write_sidecar(const std::filesystem::path& image, const Sidecar& s) {
  nlohmann::ordered_json j;
  j["min"] = s.min;
  j["max"] = s.max;
  j["horizontal_extent"] = s.horizontal_extent;
  j["vertical_scale"] = s.vertical_scale;
  std::ofstream out(sidecar_path(image));
  if (!out) throw FormatError("sidecar", "cannot write " + sidecar_path(image).string());
  out << j.dump(2) << '\n';
}

}  // namespace

HeightField::HeightField(int width, int height, std::vector<double> cells,
                         double horizontal_extent, double vertical_scale)
    : width_(width),
      height_(height),
      cells_(std::move(cells)),
      horizontal_extent_(horizontal_extent),
      vertical_scale_(vertical_scale) {
  if (width < kMinSide || height < kMinSide)
    throw InvalidArgument("heightfield: width and height must be >= 2");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidArgument("heightfield: cell count does not match width * height");
  for (double c : cells_)
    if (!std::isfinite(c)) throw InvalidArgument("heightfield: non-finite elevation");
  check_metadata(horizontal_extent, vertical_scale);
}

std::pair<double, double> HeightField::range() const {
  const auto [lo, hi] = std::minmax_element(cells_.begin(), cells_.end());
  return {*lo, *hi};
}

HeightField HeightField::with_metadata(double horizontal_extent, double vertical_scale) const {
  return HeightField(width_, height_, cells_, horizontal_extent, vertical_scale);
}

HeightField generate_heightfield(const HeightSource& source, int width, int height,
                                 double horizontal_extent) {
  if (width < kMinSide || width > kMaxSide || height < kMinSide || height > kMaxSide)
    throw InvalidArgument("generate_heightfield: width and height must be in [2, 8193]");
  if (!(horizontal_extent > 0.0) || !std::isfinite(horizontal_extent))
    throw InvalidArgument("generate_heightfield: horizontal_extent must be > 0");

  if (const auto* ds = std::get_if<DiamondSquareParams>(&source)) {
    if (ds->size_exponent < 1 || ds->size_exponent > 12)
      throw InvalidArgument("generate_heightfield: size_exponent must be in [1, 12]");
    const int side = (1 << ds->size_exponent) + 1;
    if (width != side || height != side)
      throw InvalidArgument("generate_heightfield: diamond-square grid must be square with side "
                            "2^size_exponent + 1 = " + std::to_string(side));
    return diamond_square(ds->size_exponent, ds->corners, ds->roughness, ds->seed)
        .with_metadata(horizontal_extent, 1.0);
  }

  const auto& spec = std::get<NoiseSpec>(source);
  spec.validate();
  std::vector<double> cells(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  const double dx = horizontal_extent / (width - 1);
  const double dy = horizontal_extent / (height - 1);
  parallel_for(static_cast<std::size_t>(height), [&](std::size_t row) {
    double* out = cells.data() + row * static_cast<std::size_t>(width);
    const double y = static_cast<double>(row) * dy;
    for (int col = 0; col < width; ++col) {
      const Vec3 p{col * dx, y, 0.0};
      out[col] = spec.amplitude * fbm3(p, spec);
    }
  });
  return HeightField(width, height, std::move(cells), horizontal_extent, 1.0);
}

double sample_bilinear(const HeightField& field, double u, double v) {
  if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0))
    throw OutOfDomain("sample_bilinear: (u, v) must lie in [0, 1]");

  auto to_grid = [](double t, int count) {
    const double x = t * (count - 1);
    // Snap coordinates that are a rounding error away from a node.
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 4.0 * std::numeric_limits<double>::epsilon() * (count - 1))
      return nearest;
    return x;
  };
  const double x = to_grid(u, field.width());
  const double y = to_grid(v, field.height());
  const int c0 = std::min(static_cast<int>(x), field.width() - 2);
  const int r0 = std::min(static_cast<int>(y), field.height() - 2);
  const double fx = x - c0;
  const double fy = y - r0;

  const double a = field.at(r0, c0);
  const double b = field.at(r0, c0 + 1);
  const double c = field.at(r0 + 1, c0);
  const double d = field.at(r0 + 1, c0 + 1);
  if (fx == 0.0 && fy == 0.0) return a;
  if (fx == 1.0 && fy == 0.0) return b;
  if (fx == 0.0 && fy == 1.0) return c;
  if (fx == 1.0 && fy == 1.0) return d;

  const double top = a * (1.0 - fx) + b * fx;
  const double bottom = c * (1.0 - fx) + d * fx;
  const double value = top * (1.0 - fy) + bottom * fy;
  const auto [lo, hi] = std::minmax({a, b, c, d});
  return std::clamp(value, lo, hi);
}

std::filesystem::path sidecar_path(const std::filesystem::path& image) {
  auto p = image;
  p.replace_extension(".meta.json");
  return p;
}

std::vector<std::uint16_t> quantize16(const HeightField& field) {
  const auto [lo, hi] = field.range();
  const double span = hi - lo;
  std::vector<std::uint16_t> words(field.cells().size(), 0);
  if (span == 0.0) return words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double q = std::round((field.cells()[i] - lo) / span * kQuantMax);
    words[i] = static_cast<std::uint16_t>(std::clamp(q, 0.0, kQuantMax));
  }
  return words;
}

void export_heightfield(const HeightField& field, const std::filesystem::path& path,
                        ImageFormat format) {
  const auto words = quantize16(field);
  if (format == ImageFormat::Pgm16)
    write_pgm16(path, field.width(), field.height(), words);
  else
    write_png16(path, field.width(), field.height(), words);
  const auto [lo, hi] = field.range();
  write_sidecar(path, {lo, hi, field.horizontal_extent(), field.vertical_scale()});
}

HeightField import_heightfield(const std::filesystem::path& path) {
  const Sidecar meta = read_sidecar(path);
  return import_heightfield(path, meta.horizontal_extent, meta.vertical_scale);
}

HeightField import_heightfield(const std::filesystem::path& path, double horizontal_extent,
                               double vertical_scale) {
  check_metadata(horizontal_extent, vertical_scale);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("path", "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  static constexpr std::array<unsigned char, 8> kPngSignature{0x89, 'P', 'N', 'G',
                                                               '\r', '\n', 0x1A, '\n'};
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> words;
  if (data.size() >= 8 && std::equal(kPngSignature.begin(), kPngSignature.end(), data.begin(),
                                     [](unsigned char a, char b) {
                                       return a == static_cast<unsigned char>(b);
                                     })) {
    words = read_png16(path, width, height);
  } else if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') {
    words = read_pgm16(data, width, height);
  } else {
    throw FormatError("magic", "unrecognized image signature in " + path.string());
  }

  const Sidecar meta = read_sidecar(path);
  const double span = meta.max - meta.min;
  std::vector<double> cells(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    cells[i] = span == 0.0 ? meta.min : std::lerp(meta.min, meta.max, words[i] / kQuantMax);
  return HeightField(width, height, std::move(cells), horizontal_extent, vertical_scale);
}

}  // namespace planetforge
