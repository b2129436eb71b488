#pragma once

#include "cdlpp/types.hpp"

namespace cdlpp::features {

/// Spatial grid for pooling LBP codes into per-cell histograms. Cells tile
/// the interior (code-map) region of the image.
struct LbpConfig {
  int grid_rows = 8;
  int grid_cols = 8;
};

// img(y, x) is the intensity at row y, column x. Produces one 8-bit code per
// interior pixel: bits are taken clockwise from the top-left neighbor
// (tl, t, tr, r, br, b, bl, l), most significant bit first, a bit being set
// when neighbor >= center.
Eigen::MatrixXi lbp_code_map(const Matrix& img);

// Per grid cell, a raw 256-bin count histogram of codes; cells concatenated
// row-major. Length is 256 * grid_rows * grid_cols.
Vector lbp_histogram(const Matrix& img, const LbpConfig& cfg);

// Applies lbp_histogram to every column of an image-backed SampleMatrix.
SampleMatrix lbp_features(const SampleMatrix& images, const LbpConfig& cfg);

// Column -> height x width grid using the dataset module's row-major
// flattening convention.
Matrix column_to_image(const Vector& column, int width, int height);

}  // namespace cdlpp::features
