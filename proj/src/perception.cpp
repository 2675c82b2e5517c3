#include "radae/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "radae/errors.hpp"

namespace radae {

namespace {

double lerp(double a, double b, double t) { return a + t * (b - a); }

// Source coordinate for a destination pixel centre, clamped to the valid sample range.
void source_index(std::size_t dst, std::size_t dst_size, std::size_t src_size, std::size_t& i0,
                  std::size_t& i1, double& t) {
  const double scale = static_cast<double>(src_size) / static_cast<double>(dst_size);
  double s = (static_cast<double>(dst) + 0.5) * scale - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
  i0 = static_cast<std::size_t>(std::floor(s));
  i1 = std::min(i0 + 1, src_size - 1);
  t = s - static_cast<double>(i0);
}

}  // namespace

RawImage resize_bilinear(const RawImage& img, std::size_t width, std::size_t height) {
  if (img.width == 0 || img.height == 0 || width == 0 || height == 0) {
    throw ContractError("resize_bilinear: zero-sized image");
  }
  if (img.data.size() != img.width * img.height * img.channels) {
    throw ContractError("resize_bilinear: data length does not match dimensions");
  }
  RawImage out;
  out.width = width;
  out.height = height;
  out.channels = img.channels;
  out.range = img.range;
  out.data.resize(width * height * img.channels);
  for (std::size_t y = 0; y < height; ++y) {
    std::size_t y0, y1;
    double ty;
    source_index(y, height, img.height, y0, y1, ty);
    for (std::size_t x = 0; x < width; ++x) {
      std::size_t x0, x1;
      double tx;
      source_index(x, width, img.width, x0, x1, tx);
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double top = lerp(img.at(x0, y0, c), img.at(x1, y0, c), tx);
        const double bottom = lerp(img.at(x0, y1, c), img.at(x1, y1, c), tx);
        out.data[(y * width + x) * img.channels + c] = lerp(top, bottom, ty);
      }
    }
  }
  return out;
}

Frame preprocess(const RawImage& img, const FrameGeometry& geometry) {
  if (img.width == 0 || img.height == 0 || img.data.empty()) {
    throw ContractError("preprocess: empty image");
  }
  if (img.channels != 1 && img.channels != 3) {
    throw ContractError("preprocess: images must have 1 or 3 channels");
  }
  if (geometry.resize_width == 0 || geometry.resize_height <= 2 * geometry.crop_rows) {
    throw ContractError("preprocess: crop leaves no rows");
  }
  const RawImage resized = resize_bilinear(img, geometry.resize_width, geometry.resize_height);
  const std::size_t w = geometry.out_width();
  const std::size_t h = geometry.out_height();
  const double scale = img.range == PixelRange::Byte ? 1.0 / 255.0 : 1.0;

  Frame frame(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double gray = 0.0;
      for (std::size_t c = 0; c < resized.channels; ++c) {
        gray += resized.at(x, y + geometry.crop_rows, c);
      }
      gray /= static_cast<double>(resized.channels);
      frame[y * w + x] = std::clamp(gray * scale, 0.0, 1.0);
    }
  }
  double mean = 0.0;
  for (double v : frame) mean += v;
  mean /= static_cast<double>(frame.size());
  for (double& v : frame) v = std::clamp(v - mean + 0.5, 0.0, 1.0);
  return frame;
}

void write_pgm(std::ostream& out, std::span<const double> pixels, std::size_t width,
               std::size_t height) {
  if (pixels.size() != width * height) throw ContractError("write_pgm: size mismatch");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (double v : pixels) {
    const auto byte = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    out.put(static_cast<char>(byte));
  }
}

void write_pgm(const std::string& path, std::span<const double> pixels, std::size_t width,
               std::size_t height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_pgm(out, pixels, width, height);
}

}  // namespace radae
