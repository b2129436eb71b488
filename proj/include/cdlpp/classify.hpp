#pragma once

#include "cdlpp/types.hpp"

namespace cdlpp::classify {

/// Training gallery shared by the decision rules. Columns are (possibly
/// projected) training features.
struct GalleryModel {
  Matrix features;                               // d x n_train
  std::vector<int> labels;                       // size n_train, values 1..p
  std::vector<std::vector<int>> class_columns;   // column indices per class, [c-1]
  double crc_lambda = 0.0;

  // crc_lambda 0 selects the scale-aware default 1e-3 * trace(X^T X) / n_train.
  static GalleryModel build(const Matrix& features, const std::vector<int>& labels,
                            double crc_lambda = 0.0);
};

// Label of the Euclidean-nearest training column; ties go to the lowest
// column index.
int nn_classify(const GalleryModel& gallery, const Vector& query);

// p_hat = (X^T X + lambda I)^{-1} X^T y.
Vector crc_solve(const GalleryModel& gallery, const Vector& query);

// argmin_c ||y - X_c p_hat_c||; ties to the lowest class id. The regularized
// variant divides each class residual by ||p_hat_c||.
int crc_classify(const GalleryModel& gallery, const Vector& query,
                 bool regularized_residual = false);

// argmin_c ||y - X_c (X_c^T X_c)^{-1} X_c^T y||; ties to the lowest class id.
int lrc_classify(const GalleryModel& gallery, const Vector& query);

}  // namespace cdlpp::classify
