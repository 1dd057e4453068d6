#include "mdslab/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdslab/fs_util.hpp"

namespace mdslab {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::string netpbm(const char* magic, int width, int height, const std::vector<std::uint8_t>& px) {
  std::string out = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

void parse_netpbm(const std::string& path, const char* magic, int channels, int& width, int& height,
                  std::vector<std::uint8_t>& px) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string m;
  int maxval = 0;
  in >> m >> width >> height >> maxval;
  require(in && m == magic && maxval == 255 && width > 0 && height > 0, ErrorCode::kParse,
          "'" + path + "' is not an 8-bit " + magic + " image");
  in.get();
  const std::size_t offset = static_cast<std::size_t>(in.tellg());
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  require(bytes.size() - offset == n, ErrorCode::kSizeMismatch, "'" + path + "' has a wrong pixel count");
  px.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
}

}  // namespace

GrayImage to_gray(const RTensor& unit_image) {
  require(unit_image.rank() == 2, ErrorCode::kShapeMismatch, "image tensor must be rank 2");
  GrayImage img;
  img.height = static_cast<int>(unit_image.dim(0));
  img.width = static_cast<int>(unit_image.dim(1));
  img.pixels.reserve(unit_image.size());
  for (double v : unit_image.flat()) img.pixels.push_back(to_byte(v));
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height, ErrorCode::kShapeMismatch,
          "gray image size mismatch");
  write_file_atomic(path, netpbm("P5", image.width, image.height, image.pixels));
}

void write_ppm(const std::string& path, const RgbImage& image) {
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height * 3,
          ErrorCode::kShapeMismatch, "color image size mismatch");
  write_file_atomic(path, netpbm("P6", image.width, image.height, image.pixels));
}

GrayImage read_pgm(const std::string& path) {
  GrayImage img;
  parse_netpbm(path, "P5", 1, img.width, img.height, img.pixels);
  return img;
}

RgbImage read_ppm(const std::string& path) {
  RgbImage img;
  parse_netpbm(path, "P6", 3, img.width, img.height, img.pixels);
  return img;
}

}  // namespace mdslab
