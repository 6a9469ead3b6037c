#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "planetforge/noise.hpp"

namespace planetforge {

// Raster DEM: row-major grid of stored elevations. Immutable once built.
//
// Sampling convention: u runs along columns and v along rows; u = 0 is the
// centre of the first column and u = 1 the centre of the last one. There is
// no wrap or clamp outside [0, 1].
class HeightField {
 public:
  HeightField(int width, int height, std::vector<double> cells, double horizontal_extent = 1.0,
              double vertical_scale = 1.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double horizontal_extent() const noexcept { return horizontal_extent_; }
  // World units per unit of stored elevation.
  double vertical_scale() const noexcept { return vertical_scale_; }

  double at(int row, int col) const { return cells_[index(row, col)]; }
  std::span<const double> cells() const noexcept { return cells_; }

  // (min, max) of the stored values.
  std::pair<double, double> range() const;

  HeightField with_metadata(double horizontal_extent, double vertical_scale) const;

  friend bool operator==(const HeightField&, const HeightField&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<double> cells_;
  double horizontal_extent_;
  double vertical_scale_;
};

struct DiamondSquareParams {
  int size_exponent = 10;
  CornerValues corners{0.0, 0.0, 0.0, 0.0};
  double roughness = 1.0;
  std::uint64_t seed = 0;
};

using HeightSource = std::variant<NoiseSpec, DiamondSquareParams>;

// Builds a heightfield of width x height cells (each in [2, 8193]).
// Noise source: cell (row, col) = amplitude * fbm3 at world
// (col / (width-1) * extent, row / (height-1) * extent, 0).
// Diamond-square source: width == height == 2^size_exponent + 1.
HeightField generate_heightfield(const HeightSource& source, int width, int height,
                                 double horizontal_extent);

// Bilinear interpolation between cell centres. Throws OutOfDomain outside [0,1].
double sample_bilinear(const HeightField& field, double u, double v);

enum class ImageFormat { Pgm16, Png16 };

// `<stem>.meta.json` next to the image.
std::filesystem::path sidecar_path(const std::filesystem::path& image);

// 16-bit grayscale, row-major, top row first. min maps to 0, max to 65535;
// both are recorded in the sidecar so import can invert the quantization.
void export_heightfield(const HeightField& field, const std::filesystem::path& path,
                        ImageFormat format);

// Format is detected from the file signature. Extent and vertical scale come
// from the sidecar.
HeightField import_heightfield(const std::filesystem::path& path);

// As above, overriding the sidecar's physical metadata.
HeightField import_heightfield(const std::filesystem::path& path, double horizontal_extent,
                               double vertical_scale);

// The 16-bit words export writes, row-major.
std::vector<std::uint16_t> quantize16(const HeightField& field);

}  // namespace planetforge
