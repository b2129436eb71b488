// Test-only oracles and instance generators. Everything here evaluates the
// definitions directly (explicit loops, brute-force solves) and stays
// independent of the library's matrix-form implementations.
#pragma once

#include <random>

#include "cdlpp/graph.hpp"
#include "cdlpp/subspace.hpp"
#include "cdlpp/types.hpp"

namespace testsupport {

using cdlpp::Matrix;
using cdlpp::SampleMatrix;
using cdlpp::Vector;

// Sum over unordered same-class pairs of H_ij (y_i - y_j)^2 with y = w^T x.
inline double loop_within_class_form(const Matrix& X, const std::vector<int>& labels,
                                     const Matrix& H, const Vector& w) {
  double total = 0.0;
  const int n = static_cast<int>(X.cols());
  for (int i = 0; i < n; ++i) {
    double yi = w.dot(X.col(i));
    for (int j = i + 1; j < n; ++j) {
      if (labels[static_cast<size_t>(i)] != labels[static_cast<size_t>(j)]) continue;
      double yj = w.dot(X.col(j));
      total += H(i, j) * (yi - yj) * (yi - yj);
    }
  }
  return total;
}

// Sum over unordered class-mean pairs of B_ij (m_i - m_j)^2 with m = w^T u.
inline double loop_class_mean_form(const Matrix& U, const Matrix& B, const Vector& w) {
  double total = 0.0;
  const int p = static_cast<int>(U.cols());
  for (int i = 0; i < p; ++i) {
    double mi = w.dot(U.col(i));
    for (int j = i + 1; j < p; ++j) {
      double mj = w.dot(U.col(j));
      total += B(i, j) * (mi - mj) * (mi - mj);
    }
  }
  return total;
}

// Random labeled Gaussian-mixture instance with distinct class means.
inline SampleMatrix random_instance(int p, int n, int l, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SampleMatrix ds;
  ds.p = p;
  ds.n = n;
  ds.l = l;
  ds.data.resize(l, n);
  ds.labels.resize(static_cast<size_t>(n));
  Matrix means(l, p);
  for (int c = 0; c < p; ++c) {
    for (int i = 0; i < l; ++i) means(i, c) = 3.0 * gauss(rng);
  }
  for (int j = 0; j < n; ++j) {
    int c = j % p;  // round-robin keeps every class populated
    ds.labels[static_cast<size_t>(j)] = c + 1;
    for (int i = 0; i < l; ++i) ds.data(i, j) = means(i, c) + gauss(rng);
  }
  for (int c = 0; c < p; ++c) ds.original_ids.push_back(c + 1);
  return ds;
}

inline Vector random_unit_vector(int l, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(l);
  for (int i = 0; i < l; ++i) v[i] = gauss(rng);
  return v / v.norm();
}

// Random symmetric PSD matrix of rank >= 1.
inline Matrix random_psd(int l, std::mt19937& rng, int rank = 0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (rank <= 0) rank = l;
  Matrix F(l, rank);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < rank; ++j) F(i, j) = gauss(rng);
  }
  Matrix M = F * F.transpose();
  return ((M + M.transpose()) * 0.5).eval();
}

// Largest principal angle (radians) between the column spans.
inline double max_principal_angle(const Matrix& A, const Matrix& B) {
  Eigen::HouseholderQR<Matrix> qa(A);
  Eigen::HouseholderQR<Matrix> qb(B);
  Matrix Qa = qa.householderQ() * Matrix::Identity(A.rows(), A.cols());
  Matrix Qb = qb.householderQ() * Matrix::Identity(B.rows(), B.cols());
  Eigen::JacobiSVD<Matrix> svd(Qa.transpose() * Qb);
  double angle = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double s = std::min(1.0, svd.singularValues()[i]);
    angle = std::max(angle, std::acos(s));
  }
  return angle;
}

}  // namespace testsupport
