#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdslab/tensor.hpp"

namespace mdslab {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved r, g, b
};

// Maps a rank-2 tensor with values in [0, 1] to 8-bit gray (row = axis 0).
GrayImage to_gray(const RTensor& unit_image);

// Binary P5 / P6, written atomically.
void write_pgm(const std::string& path, const GrayImage& image);
void write_ppm(const std::string& path, const RgbImage& image);

GrayImage read_pgm(const std::string& path);
RgbImage read_ppm(const std::string& path);

}  // namespace mdslab
