#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace cdlpp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Labeled sample collection. Samples are stored one per column; labels are
/// contiguous class ids 1..p (original file labels kept in original_ids).
struct SampleMatrix {
  Matrix data;              // l x n, one sample per column
  std::vector<int> labels;  // size n, values in 1..p
  int l = 0;                // feature dimensionality
  int n = 0;                // sample count
  int p = 0;                // class count
  std::vector<int> original_ids;        // size p; original id of class c at [c-1]
  std::vector<std::string> class_names; // size p when loaded from an image tree
  int image_width = 0;                  // nonzero when columns are flattened images
  int image_height = 0;

  // Throws if the labeling/shape invariants do not hold.
  void validate() const;
};

struct Fold {
  std::vector<int> train;
  std::vector<int> test;
};

/// Deterministic train/test partition over sample indices 0..n-1.
struct SplitPlan {
  std::vector<Fold> folds;
};

// Columns of `ds` selected by `indices`, labels carried along. Class ids and
// p are preserved (callers rely on split plans keeping every class trained).
SampleMatrix select_columns(const SampleMatrix& ds, const std::vector<int>& indices);

}  // namespace cdlpp
