#pragma once

#include <optional>

#include "cdlpp/types.hpp"

namespace cdlpp::graph {

enum class WeightScheme {
  DotProduct,              // max(0, cosine similarity); 0 for zero-norm columns
  DotProductUnnormalized,  // max(0, raw inner product)
  HeatKernel,              // exp(-||x_i - x_j||^2 / t)
};

struct WeightOptions {
  WeightScheme scheme = WeightScheme::DotProduct;
  double heat_t = 0.0;  // 0 = auto (median pairwise squared distance)
};

enum class GraphStructure {
  Complete,
  WithinClassComplete,  // keep only same-label pairs
  Knn,                  // keep w_ij iff i in j's k nearest or vice versa
};

struct StructureOptions {
  GraphStructure structure = GraphStructure::Complete;
  int knn_k = 5;
};

/// Symmetric nonnegative pairwise weight matrix with zero diagonal.
struct AffinityMatrix {
  Matrix weights;
  WeightScheme scheme = WeightScheme::DotProduct;
  GraphStructure structure = GraphStructure::Complete;
};

enum class ScatterKind {
  LaplacianL,
  ClassLaplacianQ,
  KernelKl,
  KernelKc,
  BetweenClassSb,
};

/// Symmetric matrix used inside a quadratic form.
struct ScatterOperand {
  Matrix m;
  ScatterKind kind = ScatterKind::LaplacianL;
};

// WithinClassComplete requires labels (1..p per column of X).
AffinityMatrix pairwise_weights(const Matrix& X, const WeightOptions& weights,
                                const StructureOptions& structure,
                                const std::vector<int>* labels = nullptr);

// L = D - A with D the diagonal of row sums.
ScatterOperand laplacian(const AffinityMatrix& affinity);

// K_l = X L X^T with L the Laplacian of the within-class affinity.
ScatterOperand within_class_kernel(const SampleMatrix& ds, const AffinityMatrix& within);

struct ClassMeans {
  Matrix U;                // l x p, column i = mean of class i
  std::vector<int> sizes;  // per-class sample counts
  Vector global_mean;      // mean over all n samples
};

ClassMeans class_means(const SampleMatrix& ds);

// K_c = U Q U^T with Q the Laplacian of the class-mean affinity B.
ScatterOperand class_laplacian_kernel(const Matrix& U, const WeightOptions& weights);

// S_b = sum_i n_i (u_i - u_bar)(u_i - u_bar)^T.
ScatterOperand between_class_scatter(const Matrix& U, const std::vector<int>& sizes,
                                     const Vector& global_mean);

// S_w = sum_c sum_{i in c} (x_i - u_c)(x_i - u_c)^T (used by the LDA learner).
Matrix within_class_scatter(const SampleMatrix& ds, const Matrix& U);

}  // namespace cdlpp::graph
