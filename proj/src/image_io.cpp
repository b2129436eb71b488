#include "cdlpp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cdlpp {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_pnm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_pnm_int(std::istream& in, const std::filesystem::path& path, const char* what) {
  std::string token = next_pnm_token(in);
  try {
    size_t pos = 0;
    int value = std::stoi(token, &pos);
    if (pos != token.size() || value <= 0) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    fail(path, std::string("invalid ") + what + " in PNM header");
  }
}

std::uint8_t average_rounded(int r, int g, int b) {
  return static_cast<std::uint8_t>(std::llround((r + g + b) / 3.0));
}

GrayImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::string magic = next_pnm_token(in);
  bool ascii = (magic == "P2" || magic == "P3");
  bool binary = (magic == "P5" || magic == "P6");
  bool color = (magic == "P3" || magic == "P6");
  if (!ascii && !binary) fail(path, "unsupported PNM magic '" + magic + "'");

  GrayImage img;
  img.width = parse_pnm_int(in, path, "width");
  img.height = parse_pnm_int(in, path, "height");
  int maxval = parse_pnm_int(in, path, "maxval");
  if (maxval > 255) fail(path, "only 8-bit PNM images are supported");
  size_t pixel_count = static_cast<size_t>(img.width) * img.height;
  img.pixels.resize(pixel_count);

  int channels = color ? 3 : 1;
  if (ascii) {
    for (size_t i = 0; i < pixel_count; ++i) {
      int v[3] = {0, 0, 0};
      for (int ch = 0; ch < channels; ++ch) {
        if (!(in >> v[ch])) fail(path, "truncated PNM raster");
        if (v[ch] < 0 || v[ch] > maxval) fail(path, "PNM sample out of range");
      }
      img.pixels[i] = color ? average_rounded(v[0], v[1], v[2])
                            : static_cast<std::uint8_t>(v[0]);
    }
  } else {
    // The header ends with exactly one whitespace byte before the raster.
    std::vector<std::uint8_t> raw(pixel_count * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size()) fail(path, "truncated PNM raster");
    for (size_t i = 0; i < pixel_count; ++i) {
      img.pixels[i] = color ? average_rounded(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2])
                            : raw[i];
    }
  }
  return img;
}

struct PngReader {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;

  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

GrayImage read_png(const std::filesystem::path& path) {
  PngReader r;
  r.fp = std::fopen(path.string().c_str(), "rb");
  if (!r.fp) fail(path, "cannot open file");
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) fail(path, "png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) fail(path, "png_create_info_struct failed");
  if (setjmp(png_jmpbuf(r.png))) fail(path, "failed to decode PNG");

  png_init_io(r.png, r.fp);
  png_read_info(r.png, r.info);

  png_uint_32 width = png_get_image_width(r.png, r.info);
  png_uint_32 height = png_get_image_height(r.png, r.info);
  int color_type = png_get_color_type(r.png, r.info);
  int bit_depth = png_get_bit_depth(r.png, r.info);

  if (bit_depth == 16) png_set_strip_16(r.png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
  png_read_update_info(r.png, r.info);

  int channels = png_get_channels(r.png, r.info);
  size_t rowbytes = png_get_rowbytes(r.png, r.info);
  std::vector<std::uint8_t> raster(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowbytes;
  png_read_image(r.png, rows.data());

  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.pixels.resize(static_cast<size_t>(width) * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = raster.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < width; ++x) {
      const std::uint8_t* px = row + x * channels;
      std::uint8_t gray;
      switch (channels) {
        case 1: gray = px[0]; break;
        case 2: gray = px[0]; break;  // gray + alpha
        default: gray = average_rounded(px[0], px[1], px[2]); break;  // rgb / rgba
      }
      img.pixels[static_cast<size_t>(y) * width + x] = gray;
    }
  }
  return img;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
  std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  fail(path, "unsupported image format '" + ext + "'");
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) fail(path, "write failed");
}

bool has_supported_image_extension(const std::filesystem::path& path) {
  std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace cdlpp
