#include "cdlpp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdlpp::graph {

namespace {

Matrix squared_distances(const Matrix& X) {
  const Eigen::Index n = X.cols();
  Vector sq = X.colwise().squaredNorm();
  Matrix d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) - 2.0 * (X.transpose() * X);
  return d2.cwiseMax(0.0);
}

double median_offdiag(const Matrix& d2) {
  std::vector<double> values;
  const Eigen::Index n = d2.rows();
  values.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) values.push_back(d2(i, j));
  }
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t m = values.size();
  if (m % 2 == 1) return values[m / 2];
  return 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

// Keeps only entries where i is among j's k nearest or vice versa.
std::vector<std::vector<bool>> knn_mask(const Matrix& X, int k) {
  const int n = static_cast<int>(X.cols());
  Matrix d2 = squared_distances(X);
  std::vector<std::vector<bool>> keep(n, std::vector<bool>(n, false));
  for (int j = 0; j < n; ++j) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + j);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return d2(a, j) < d2(b, j); });
    for (int r = 0; r < k; ++r) {
      keep[order[r]][j] = true;
      keep[j][order[r]] = true;
    }
  }
  return keep;
}

}  // namespace

AffinityMatrix pairwise_weights(const Matrix& X, const WeightOptions& weights,
                                const StructureOptions& structure,
                                const std::vector<int>* labels) {
  const int n = static_cast<int>(X.cols());
  if (!X.allFinite()) {
    throw std::invalid_argument("affinity input contains non-finite values");
  }
  if (structure.structure == GraphStructure::WithinClassComplete) {
    if (labels == nullptr || static_cast<int>(labels->size()) != n) {
      throw std::invalid_argument("within-class structure needs one label per column");
    }
  }
  if (structure.structure == GraphStructure::Knn && structure.knn_k >= n) {
    throw std::invalid_argument("knn structure needs k < n, got k=" +
                                std::to_string(structure.knn_k) + " with n=" + std::to_string(n));
  }
  if (weights.scheme == WeightScheme::HeatKernel && weights.heat_t < 0.0) {
    throw std::invalid_argument("heat-kernel t must be positive (0 selects the median rule)");
  }

  Matrix base;
  switch (weights.scheme) {
    case WeightScheme::DotProduct: {
      Matrix normalized = X;
      for (int j = 0; j < n; ++j) {
        double norm = normalized.col(j).norm();
        if (norm > 0.0) normalized.col(j) /= norm;
        else normalized.col(j).setZero();
      }
      base = normalized.transpose() * normalized;
      break;
    }
    case WeightScheme::DotProductUnnormalized:
      base = X.transpose() * X;
      break;
    case WeightScheme::HeatKernel: {
      Matrix d2 = squared_distances(X);
      double t = weights.heat_t;
      if (t == 0.0) {
        t = median_offdiag(d2);
        if (t <= 0.0) t = 1.0;  // all points coincide
      }
      base = (-d2 / t).array().exp().matrix();
      break;
    }
  }

  std::vector<std::vector<bool>> mask;
  if (structure.structure == GraphStructure::Knn) mask = knn_mask(X, structure.knn_k);

  AffinityMatrix out;
  out.scheme = weights.scheme;
  out.structure = structure.structure;
  out.weights = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool keep = true;
      if (structure.structure == GraphStructure::WithinClassComplete) {
        keep = (*labels)[i] == (*labels)[j];
      } else if (structure.structure == GraphStructure::Knn) {
        keep = mask[i][j];
      }
      if (!keep) continue;
      double w = std::max(0.0, base(i, j));
      out.weights(i, j) = w;
      out.weights(j, i) = w;
    }
  }
  return out;
}

ScatterOperand laplacian(const AffinityMatrix& affinity) {
  const Matrix& A = affinity.weights;
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("affinity matrix must be square");
  }
  Matrix L = -A;
  L.diagonal() += A.rowwise().sum();
  return {L, ScatterKind::LaplacianL};
}

ScatterOperand within_class_kernel(const SampleMatrix& ds, const AffinityMatrix& within) {
  if (within.structure != GraphStructure::WithinClassComplete) {
    throw std::invalid_argument("within-class kernel expects a within-class-complete affinity");
  }
  if (within.weights.rows() != ds.n) {
    throw std::invalid_argument("affinity size does not match sample count");
  }
  Matrix L = laplacian(within).m;
  Matrix K = ds.data * L * ds.data.transpose();
  K = ((K + K.transpose()) * 0.5).eval();
  return {std::move(K), ScatterKind::KernelKl};
}

ClassMeans class_means(const SampleMatrix& ds) {
  ds.validate();
  ClassMeans out;
  out.U = Matrix::Zero(ds.l, ds.p);
  out.sizes.assign(ds.p, 0);
  for (int i = 0; i < ds.n; ++i) {
    out.U.col(ds.labels[i] - 1) += ds.data.col(i);
    out.sizes[ds.labels[i] - 1] += 1;
  }
  for (int c = 0; c < ds.p; ++c) out.U.col(c) /= static_cast<double>(out.sizes[c]);
  out.global_mean = ds.data.rowwise().mean();
  return out;
}

ScatterOperand class_laplacian_kernel(const Matrix& U, const WeightOptions& weights) {
  if (U.cols() < 2) {
    throw std::invalid_argument("class Laplacian kernel needs at least 2 classes");
  }
  AffinityMatrix B = pairwise_weights(U, weights, {GraphStructure::Complete, 0});
  Matrix Q = laplacian(B).m;
  Matrix K = U * Q * U.transpose();
  K = ((K + K.transpose()) * 0.5).eval();
  return {std::move(K), ScatterKind::KernelKc};
}

ScatterOperand between_class_scatter(const Matrix& U, const std::vector<int>& sizes,
                                     const Vector& global_mean) {
  if (static_cast<Eigen::Index>(sizes.size()) != U.cols() || global_mean.size() != U.rows()) {
    throw std::invalid_argument("between-class scatter operands have mismatched shapes");
  }
  Matrix Sb = Matrix::Zero(U.rows(), U.rows());
  for (Eigen::Index c = 0; c < U.cols(); ++c) {
    if (sizes[static_cast<size_t>(c)] <= 0) {
      throw std::invalid_argument("class sizes must be positive");
    }
    Vector centered = U.col(c) - global_mean;
    Sb.noalias() += sizes[static_cast<size_t>(c)] * (centered * centered.transpose());
  }
  return {std::move(Sb), ScatterKind::BetweenClassSb};
}

Matrix within_class_scatter(const SampleMatrix& ds, const Matrix& U) {
  if (U.rows() != ds.l || U.cols() != ds.p) {
    throw std::invalid_argument("class mean matrix has mismatched shape");
  }
  Matrix Sw = Matrix::Zero(ds.l, ds.l);
  for (int i = 0; i < ds.n; ++i) {
    Vector centered = ds.data.col(i) - U.col(ds.labels[i] - 1);
    Sw.noalias() += centered * centered.transpose();
  }
  return Sw;
}

}  // namespace cdlpp::graph
