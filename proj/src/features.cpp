#include "cdlpp/features.hpp"

namespace cdlpp::features {

namespace {

// Maps position i in [0, total) to its block id when total is cut into
// `blocks` near-equal contiguous pieces, earlier pieces taking the remainder.
int block_of(int i, int total, int blocks) {
  int base = total / blocks;
  int rem = total % blocks;
  int wide = rem * (base + 1);
  if (i < wide) return i / (base + 1);
  return rem + (i - wide) / base;
}

}  // namespace

Eigen::MatrixXi lbp_code_map(const Matrix& img) {
  const int height = static_cast<int>(img.rows());
  const int width = static_cast<int>(img.cols());
  if (width < 3 || height < 3) {
    throw std::invalid_argument("LBP needs an image of at least 3x3 pixels, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  Eigen::MatrixXi codes(height - 2, width - 2);
  for (int y = 1; y + 1 < height; ++y) {
    for (int x = 1; x + 1 < width; ++x) {
      const double center = img(y, x);
      // Clockwise from the top-left neighbor, most significant bit first.
      const double neighbors[8] = {img(y - 1, x - 1), img(y - 1, x), img(y - 1, x + 1),
                                   img(y, x + 1),     img(y + 1, x + 1), img(y + 1, x),
                                   img(y + 1, x - 1), img(y, x - 1)};
      int code = 0;
      for (int b = 0; b < 8; ++b) {
        if (neighbors[b] >= center) code |= 1 << (7 - b);
      }
      codes(y - 1, x - 1) = code;
    }
  }
  return codes;
}

Vector lbp_histogram(const Matrix& img, const LbpConfig& cfg) {
  if (cfg.grid_rows < 1 || cfg.grid_cols < 1) {
    throw std::invalid_argument("LBP grid must be at least 1x1");
  }
  Eigen::MatrixXi codes = lbp_code_map(img);
  const int code_rows = static_cast<int>(codes.rows());
  const int code_cols = static_cast<int>(codes.cols());
  if (cfg.grid_rows > code_rows || cfg.grid_cols > code_cols) {
    throw std::invalid_argument("LBP grid " + std::to_string(cfg.grid_rows) + "x" +
                                std::to_string(cfg.grid_cols) + " is finer than the code map " +
                                std::to_string(code_rows) + "x" + std::to_string(code_cols));
  }

  Vector hist = Vector::Zero(256LL * cfg.grid_rows * cfg.grid_cols);
  for (int y = 0; y < code_rows; ++y) {
    const int cell_r = block_of(y, code_rows, cfg.grid_rows);
    for (int x = 0; x < code_cols; ++x) {
      const int cell_c = block_of(x, code_cols, cfg.grid_cols);
      const int cell = cell_r * cfg.grid_cols + cell_c;
      hist[cell * 256 + codes(y, x)] += 1.0;
    }
  }
  return hist;
}

Matrix column_to_image(const Vector& column, int width, int height) {
  if (static_cast<int>(column.size()) != width * height) {
    throw std::invalid_argument("column length " + std::to_string(column.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  Matrix img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) img(y, x) = column[y * width + x];
  }
  return img;
}

SampleMatrix lbp_features(const SampleMatrix& images, const LbpConfig& cfg) {
  if (images.image_width == 0 || images.image_height == 0) {
    throw std::invalid_argument("LBP features need image-backed samples with known dimensions");
  }
  SampleMatrix out;
  out.n = images.n;
  out.p = images.p;
  out.labels = images.labels;
  out.original_ids = images.original_ids;
  out.class_names = images.class_names;
  out.l = 256 * cfg.grid_rows * cfg.grid_cols;
  out.data.resize(out.l, out.n);
  for (int i = 0; i < images.n; ++i) {
    Matrix img = column_to_image(images.data.col(i), images.image_width, images.image_height);
    out.data.col(i) = lbp_histogram(img, cfg);
  }
  return out;
}

}  // namespace cdlpp::features
