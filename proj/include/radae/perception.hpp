#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "radae/types.hpp"

namespace radae {

enum class PixelRange { Unit, Byte };  // [0,1] or [0,255]

/// Camera or simulator output, row-major, channels interleaved.
struct RawImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;  // 1 (gray) or 3 (RGB)
  PixelRange range = PixelRange::Unit;
  std::vector<double> data;

  double at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return data[(y * width + x) * channels + c];
  }
};

/// Resize target and vertical crop. The frame is resize_width x (resize_height - 2 * crop_rows).
struct FrameGeometry {
  std::size_t resize_width = 128;
  std::size_t resize_height = 96;
  std::size_t crop_rows = 19;

  std::size_t out_width() const { return resize_width; }
  std::size_t out_height() const { return resize_height - 2 * crop_rows; }
  std::size_t dim() const { return out_width() * out_height(); }
};

/// Bilinear resize with half-pixel centres; channels are kept.
RawImage resize_bilinear(const RawImage& img, std::size_t width, std::size_t height);

/// Resize, crop top and bottom, average channels to gray, scale to [0,1], subtract the image
/// mean, add 0.5 and clamp to [0,1]. Flattened row-major.
Frame preprocess(const RawImage& img, const FrameGeometry& geometry);

/// Binary PGM (P5), 8-bit, values clamped to [0,1] before scaling.
void write_pgm(std::ostream& out, std::span<const double> pixels, std::size_t width,
               std::size_t height);
void write_pgm(const std::string& path, std::span<const double> pixels, std::size_t width,
               std::size_t height);

}  // namespace radae
