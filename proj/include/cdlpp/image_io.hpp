#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cdlpp {

/// 8-bit grayscale image, row-major pixel storage.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size width*height, row-major

  std::uint8_t at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// Reads PGM/PPM (P2/P3/P5/P6) or PNG. Multi-channel input is reduced to gray
// by the integer-rounded average of the color channels.
GrayImage read_gray_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);

bool has_supported_image_extension(const std::filesystem::path& path);

}  // namespace cdlpp
