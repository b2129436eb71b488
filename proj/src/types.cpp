#include "cdlpp/types.hpp"

#include <set>

namespace cdlpp {

void SampleMatrix::validate() const {
  if (data.rows() != l || data.cols() != n) {
    throw std::invalid_argument("sample matrix shape does not match l/n fields");
  }
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("label count does not match sample count");
  }
  if (!data.allFinite()) {
    throw std::invalid_argument("sample matrix contains non-finite values");
  }
  std::set<int> seen;
  for (int label : labels) {
    if (label < 1 || label > p) {
      throw std::invalid_argument("label " + std::to_string(label) + " outside 1.." +
                                  std::to_string(p));
    }
    seen.insert(label);
  }
  if (static_cast<int>(seen.size()) != p) {
    throw std::invalid_argument("some class in 1.." + std::to_string(p) + " has no samples");
  }
}

SampleMatrix select_columns(const SampleMatrix& ds, const std::vector<int>& indices) {
  SampleMatrix out;
  out.l = ds.l;
  out.n = static_cast<int>(indices.size());
  out.p = ds.p;
  out.original_ids = ds.original_ids;
  out.class_names = ds.class_names;
  out.image_width = ds.image_width;
  out.image_height = ds.image_height;
  out.data.resize(ds.l, out.n);
  out.labels.resize(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    int idx = indices[i];
    if (idx < 0 || idx >= ds.n) {
      throw std::out_of_range("sample index " + std::to_string(idx) + " outside 0.." +
                              std::to_string(ds.n - 1));
    }
    out.data.col(static_cast<Eigen::Index>(i)) = ds.data.col(idx);
    out.labels[i] = ds.labels[idx];
  }
  return out;
}

}  // namespace cdlpp
