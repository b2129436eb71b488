#pragma once

#include <filesystem>

#include "cdlpp/graph.hpp"
#include "cdlpp/types.hpp"

namespace cdlpp::subspace {

enum class PcaKeep { None, RankSafe, Explicit };

struct LearnerConfig {
  int d = 0;             // 0 = default to p-1
  double beta = 0.1;     // collaboration weight, >= 0
  double ridge = 1e-6;   // relative ridge for singular denominators
  PcaKeep pca_keep = PcaKeep::RankSafe;
  int pca_dims = 0;      // used with PcaKeep::Explicit
  double zero_tol_rel = 1e-10;  // eigenvalues <= zero_tol_rel * lambda_max count as zero
  graph::WeightOptions weights;
  int lpp_knn = 5;       // neighborhood size of the unsupervised LPP graph
  graph::GraphStructure lpp_structure = graph::GraphStructure::Knn;
};

/// Learned projection basis. W lives in the solver's working space; when a
/// PCA pre-projection is present the effective pixel-space projection is
/// pre * W. Columns are unit L2 norm with the first component of magnitude
/// above 1e-12 made positive.
struct ProjectionBasis {
  Matrix W;            // working_dim x d
  Vector eigenvalues;  // ascending for min-type learners, descending for max-type
  Matrix pre;          // input_dim x working_dim, orthonormal columns; 0x0 if absent

  bool has_pre() const { return pre.size() > 0; }
  int dim() const { return static_cast<int>(W.cols()); }
  int input_dim() const { return static_cast<int>(has_pre() ? pre.rows() : W.rows()); }

  // pre * W when a pre-projection is present, W otherwise.
  Matrix effective() const;
};

enum class EigDirection { MinNonzero, Max };

// Solves A w = lambda B' w for symmetric PSD A, B. B' = B + eps*I with
// eps = ridge * trace(B) / l whenever B is not safely positive definite.
// Returns the d eigenpairs selected by `direction`, skipping eigenvalues at
// or below zero_tol_rel * lambda_max.
ProjectionBasis solve_sym_definite_geig(const Matrix& A, const Matrix& B,
                                        const LearnerConfig& cfg, EigDirection direction);

ProjectionBasis fit_pca(const SampleMatrix& ds, const LearnerConfig& cfg);
ProjectionBasis fit_lda(const SampleMatrix& ds, const LearnerConfig& cfg);
ProjectionBasis fit_lpp(const SampleMatrix& ds, const LearnerConfig& cfg);
ProjectionBasis fit_dlpp(const SampleMatrix& ds, const LearnerConfig& cfg);
ProjectionBasis fit_cslpp(const SampleMatrix& ds, const LearnerConfig& cfg);
ProjectionBasis fit_cdlpp(const SampleMatrix& ds, const LearnerConfig& cfg);

// Y = W^T (P^T X); columns correspond to input columns.
Matrix project(const ProjectionBasis& basis, const Matrix& X);

// Text serialization at 17 significant digits; round-trips bit-exact.
void save_basis(const std::filesystem::path& path, const ProjectionBasis& basis,
                const LearnerConfig& cfg);
std::pair<ProjectionBasis, LearnerConfig> load_basis(const std::filesystem::path& path);

}  // namespace cdlpp::subspace
