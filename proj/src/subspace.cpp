#include "cdlpp/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cdlpp::subspace {

namespace {

constexpr double kSymmetryTolRel = 1e-12;
constexpr double kResidualTolRel = 1e-8;
constexpr double kSignTol = 1e-12;

void require_symmetric(const Matrix& M, const char* name) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(name) + " must be square");
  }
  double scale = M.size() > 0 ? M.cwiseAbs().maxCoeff() : 0.0;
  double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolRel * scale) {
    throw std::invalid_argument(std::string(name) + " is not symmetric");
  }
}

void fix_sign(Eigen::Ref<Vector> w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > kSignTol) {
      if (w[i] < 0.0) w = -w;
      return;
    }
  }
}

int resolve_dim(const LearnerConfig& cfg, int p) {
  if (cfg.d > 0) return cfg.d;
  return std::max(1, p - 1);
}

struct PcaDecomposition {
  Matrix basis;       // columns descending by eigenvalue, unit norm, sign-fixed
  Vector eigenvalues; // descending
  int rank = 0;       // eigenvalues above zero_tol_rel * lambda_max
};

// Sample-covariance eigendecomposition of the mean-centered data. Uses the
// n x n Gram matrix when l > n; both routes agree on the retained subspace.
PcaDecomposition pca_decompose(const Matrix& X, double zero_tol_rel) {
  const Eigen::Index l = X.rows();
  const Eigen::Index n = X.cols();
  if (n < 2) {
    throw std::invalid_argument("PCA needs at least 2 samples");
  }
  Vector mean = X.rowwise().mean();
  Matrix Xc = X.colwise() - mean;
  const double denom = static_cast<double>(n - 1);

  PcaDecomposition out;
  if (l <= n) {
    Matrix C = (Xc * Xc.transpose()) / denom;
    C = ((C + C.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(C);
    if (es.info() != Eigen::Success) throw std::runtime_error("PCA eigendecomposition failed");
    const Eigen::Index m = l;
    out.basis.resize(l, m);
    out.eigenvalues.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      out.basis.col(i) = es.eigenvectors().col(m - 1 - i);
      out.eigenvalues[i] = es.eigenvalues()[m - 1 - i];
    }
  } else {
    Matrix G = (Xc.transpose() * Xc) / denom;
    G = ((G + G.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) throw std::runtime_error("PCA eigendecomposition failed");
    const Eigen::Index m = n;
    out.basis.resize(l, m);
    out.eigenvalues.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double lambda = es.eigenvalues()[m - 1 - i];
      out.eigenvalues[i] = lambda;
      Vector u = Xc * es.eigenvectors().col(m - 1 - i);
      double norm = u.norm();
      if (norm > 0.0) u /= norm;
      out.basis.col(i) = u;
    }
  }

  double lambda_max = std::max(out.eigenvalues[0], 0.0);
  double threshold = zero_tol_rel * lambda_max;
  out.rank = 0;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues[i] > threshold) ++out.rank;
  }
  for (Eigen::Index i = 0; i < out.basis.cols(); ++i) fix_sign(out.basis.col(i));
  return out;
}

struct PreProjected {
  Matrix pre;          // 0x0 when no pre-projection is applied
  SampleMatrix reduced;
};

PreProjected apply_pre_projection(const SampleMatrix& ds, const LearnerConfig& cfg) {
  PreProjected out;
  if (cfg.pca_keep == PcaKeep::None) {
    out.reduced = ds;
    return out;
  }
  PcaDecomposition pca = pca_decompose(ds.data, cfg.zero_tol_rel);
  if (pca.rank < 1) {
    throw std::invalid_argument("centered data has rank 0; no pre-projection possible");
  }
  int keep;
  if (cfg.pca_keep == PcaKeep::Explicit) {
    keep = cfg.pca_dims;
    if (keep < 1 || keep > pca.rank) {
      throw std::invalid_argument("explicit PCA pre-projection needs 1 <= k <= rank, got k=" +
                                  std::to_string(keep) + " with rank " +
                                  std::to_string(pca.rank));
    }
  } else {
    keep = std::max(1, std::min(ds.n - ds.p, ds.l));
    keep = std::min(keep, pca.rank);
  }
  out.pre = pca.basis.leftCols(keep);
  out.reduced = ds;
  out.reduced.data = out.pre.transpose() * ds.data;
  out.reduced.l = keep;
  out.reduced.image_width = 0;
  out.reduced.image_height = 0;
  return out;
}

ProjectionBasis with_pre(ProjectionBasis basis, PreProjected& pre) {
  if (pre.pre.size() > 0) basis.pre = std::move(pre.pre);
  return basis;
}

}  // namespace

Matrix ProjectionBasis::effective() const {
  if (!has_pre()) return W;
  return pre * W;
}

ProjectionBasis solve_sym_definite_geig(const Matrix& A, const Matrix& B,
                                        const LearnerConfig& cfg, EigDirection direction) {
  require_symmetric(A, "A");
  require_symmetric(B, "B");
  if (A.rows() != B.rows()) {
    throw std::invalid_argument("pencil matrices must have identical shapes");
  }
  if (cfg.d < 1) {
    throw std::invalid_argument("requested dimension must be at least 1");
  }
  const Eigen::Index l = A.rows();
  Matrix As = ((A + A.transpose()) * 0.5).eval();
  Matrix Bs = ((B + B.transpose()) * 0.5).eval();

  // Ridge B when it is singular or close enough that the factorization is
  // untrustworthy.
  double eps = cfg.ridge * Bs.trace() / static_cast<double>(l);
  if (!(eps > 0.0)) eps = cfg.ridge;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> bes(Bs, Eigen::EigenvaluesOnly);
    if (bes.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of B failed");
    if (bes.eigenvalues()[0] <= eps) {
      Bs.diagonal().array() += eps;
    }
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(As, Bs,
                                                       Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) {
    throw std::runtime_error("generalized eigensolver failed");
  }

  const Vector& evals = ges.eigenvalues();
  double lambda_max = std::max(evals[l - 1], 0.0);
  double threshold = cfg.zero_tol_rel * lambda_max;
  std::vector<Eigen::Index> qualifying;
  for (Eigen::Index i = 0; i < l; ++i) {
    if (evals[i] > threshold) qualifying.push_back(i);
  }
  if (static_cast<int>(qualifying.size()) < cfg.d) {
    throw std::invalid_argument("only " + std::to_string(qualifying.size()) +
                                " eigenvalue(s) qualify above the zero threshold, " +
                                std::to_string(cfg.d) + " requested");
  }

  std::vector<Eigen::Index> selected(static_cast<size_t>(cfg.d));
  if (direction == EigDirection::MinNonzero) {
    std::copy(qualifying.begin(), qualifying.begin() + cfg.d, selected.begin());
  } else {
    // Largest first.
    for (int i = 0; i < cfg.d; ++i) selected[static_cast<size_t>(i)] = qualifying[qualifying.size() - 1 - i];
  }

  const double a_norm = As.norm();
  const double b_norm = Bs.norm();
  ProjectionBasis basis;
  basis.W.resize(l, cfg.d);
  basis.eigenvalues.resize(cfg.d);
  for (int k = 0; k < cfg.d; ++k) {
    Vector w = ges.eigenvectors().col(selected[static_cast<size_t>(k)]);
    w /= w.norm();
    // Rayleigh quotient of the regularized pencil; the reported eigenvalue is
    // the objective value at the returned direction.
    double lambda = w.dot(As * w) / w.dot(Bs * w);
    double residual = (As * w - lambda * (Bs * w)).norm();
    if (residual > kResidualTolRel * (a_norm + lambda * b_norm)) {
      throw std::runtime_error("eigenpair residual " + std::to_string(residual) +
                               " exceeds the accepted bound");
    }
    fix_sign(w);
    basis.W.col(k) = w;
    basis.eigenvalues[k] = lambda;
  }
  return basis;
}

ProjectionBasis fit_pca(const SampleMatrix& ds, const LearnerConfig& cfg) {
  ds.validate();
  if (ds.n < 2) throw std::invalid_argument("PCA needs at least 2 samples");
  int d = resolve_dim(cfg, ds.p);
  PcaDecomposition pca = pca_decompose(ds.data, cfg.zero_tol_rel);
  if (d > pca.rank) {
    throw std::invalid_argument("d=" + std::to_string(d) + " exceeds the rank " +
                                std::to_string(pca.rank) + " of the centered data");
  }
  ProjectionBasis basis;
  basis.W = pca.basis.leftCols(d);
  basis.eigenvalues = pca.eigenvalues.head(d);
  return basis;
}

ProjectionBasis fit_lda(const SampleMatrix& ds, const LearnerConfig& cfg) {
  ds.validate();
  if (ds.p < 2) throw std::invalid_argument("LDA needs at least 2 classes");
  int d = resolve_dim(cfg, ds.p);
  if (d > ds.p - 1) {
    throw std::invalid_argument("LDA retains at most p-1=" + std::to_string(ds.p - 1) +
                                " dimensions, requested " + std::to_string(d));
  }
  PreProjected pre = apply_pre_projection(ds, cfg);
  graph::ClassMeans cm = graph::class_means(pre.reduced);
  Matrix Sb = graph::between_class_scatter(cm.U, cm.sizes, cm.global_mean).m;
  Matrix Sw = graph::within_class_scatter(pre.reduced, cm.U);
  LearnerConfig solver_cfg = cfg;
  solver_cfg.d = d;
  return with_pre(solve_sym_definite_geig(Sb, Sw, solver_cfg, EigDirection::Max), pre);
}

ProjectionBasis fit_lpp(const SampleMatrix& ds, const LearnerConfig& cfg) {
  ds.validate();
  graph::StructureOptions structure;
  structure.structure = cfg.lpp_structure;
  structure.knn_k = std::min(cfg.lpp_knn, ds.n - 1);
  graph::AffinityMatrix affinity =
      graph::pairwise_weights(ds.data, cfg.weights, structure, &ds.labels);
  Matrix L = graph::laplacian(affinity).m;
  Vector degrees = affinity.weights.rowwise().sum();

  PreProjected pre = apply_pre_projection(ds, cfg);
  const Matrix& Xr = pre.reduced.data;
  Matrix A = Xr * L * Xr.transpose();
  A = ((A + A.transpose()) * 0.5).eval();
  Matrix B = Xr * degrees.asDiagonal() * Xr.transpose();
  B = ((B + B.transpose()) * 0.5).eval();

  LearnerConfig solver_cfg = cfg;
  solver_cfg.d = resolve_dim(cfg, ds.p);
  return with_pre(solve_sym_definite_geig(A, B, solver_cfg, EigDirection::MinNonzero), pre);
}

namespace {

// Shared CDLPP/CSLPP/DLPP plumbing: within-class locality numerator against a
// configurable denominator, with graph weights always taken from the
// original-space geometry.
struct DiscriminantParts {
  PreProjected pre;
  Matrix K_l;
  graph::ClassMeans reduced_means;
};

DiscriminantParts discriminant_parts(const SampleMatrix& ds, const LearnerConfig& cfg) {
  DiscriminantParts parts;
  graph::AffinityMatrix within = graph::pairwise_weights(
      ds.data, cfg.weights, {graph::GraphStructure::WithinClassComplete, 0}, &ds.labels);
  parts.pre = apply_pre_projection(ds, cfg);
  parts.K_l = graph::within_class_kernel(parts.pre.reduced, within).m;
  parts.reduced_means = graph::class_means(parts.pre.reduced);
  return parts;
}

ProjectionBasis fit_collaborative(const SampleMatrix& ds, const LearnerConfig& cfg, double beta) {
  ds.validate();
  if (ds.p < 2) throw std::invalid_argument("needs at least 2 classes");
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  DiscriminantParts parts = discriminant_parts(ds, cfg);
  Matrix Sb = graph::between_class_scatter(parts.reduced_means.U, parts.reduced_means.sizes,
                                           parts.reduced_means.global_mean).m;
  Matrix A = parts.K_l;
  if (beta > 0.0) A.diagonal().array() += beta;  // beta acts in the working space
  LearnerConfig solver_cfg = cfg;
  solver_cfg.d = resolve_dim(cfg, ds.p);
  return with_pre(solve_sym_definite_geig(A, Sb, solver_cfg, EigDirection::MinNonzero),
                  parts.pre);
}

}  // namespace

ProjectionBasis fit_dlpp(const SampleMatrix& ds, const LearnerConfig& cfg) {
  ds.validate();
  if (ds.p < 2) throw std::invalid_argument("DLPP needs at least 2 classes");
  DiscriminantParts parts = discriminant_parts(ds, cfg);

  // Class-mean affinity from original-space means, kernel from working-space means.
  Matrix U_orig = graph::class_means(ds).U;
  graph::AffinityMatrix B =
      graph::pairwise_weights(U_orig, cfg.weights, {graph::GraphStructure::Complete, 0});
  Matrix Q = graph::laplacian(B).m;
  const Matrix& Ur = parts.reduced_means.U;
  Matrix K_c = Ur * Q * Ur.transpose();
  K_c = ((K_c + K_c.transpose()) * 0.5).eval();

  LearnerConfig solver_cfg = cfg;
  solver_cfg.d = resolve_dim(cfg, ds.p);
  return with_pre(solve_sym_definite_geig(parts.K_l, K_c, solver_cfg, EigDirection::MinNonzero),
                  parts.pre);
}

ProjectionBasis fit_cslpp(const SampleMatrix& ds, const LearnerConfig& cfg) {
  return fit_collaborative(ds, cfg, 0.0);
}

ProjectionBasis fit_cdlpp(const SampleMatrix& ds, const LearnerConfig& cfg) {
  return fit_collaborative(ds, cfg, cfg.beta);
}

Matrix project(const ProjectionBasis& basis, const Matrix& X) {
  if (X.rows() != basis.input_dim()) {
    throw std::invalid_argument("projection input has " + std::to_string(X.rows()) +
                                " rows, basis expects " + std::to_string(basis.input_dim()));
  }
  if (basis.has_pre()) return basis.W.transpose() * (basis.pre.transpose() * X);
  return basis.W.transpose() * X;
}

namespace {

void write_matrix(std::ostream& os, const Matrix& M) {
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c > 0) os << ' ';
      os << M(r, c);
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(is >> M(r, c))) throw std::runtime_error("basis file truncated");
    }
  }
  return M;
}

}  // namespace

void save_basis(const std::filesystem::path& path, const ProjectionBasis& basis,
                const LearnerConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << std::setprecision(17);
  os << "cdlpp-basis 1\n";
  os << "W " << basis.W.rows() << ' ' << basis.W.cols() << '\n';
  os << "pre " << basis.pre.rows() << ' ' << basis.pre.cols() << '\n';
  os << "config " << cfg.d << ' ' << cfg.beta << ' ' << cfg.ridge << ' '
     << static_cast<int>(cfg.pca_keep) << ' ' << cfg.pca_dims << ' ' << cfg.zero_tol_rel << ' '
     << static_cast<int>(cfg.weights.scheme) << ' ' << cfg.weights.heat_t << ' ' << cfg.lpp_knn
     << ' ' << static_cast<int>(cfg.lpp_structure) << '\n';
  os << "eigenvalues\n";
  write_matrix(os, basis.eigenvalues.transpose());
  os << "basis\n";
  write_matrix(os, basis.W);
  if (basis.pre.size() > 0) {
    os << "preprojection\n";
    write_matrix(os, basis.pre);
  }
  if (!os) throw std::runtime_error(path.string() + ": write failed");
}

std::pair<ProjectionBasis, LearnerConfig> load_basis(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path.string() + ": cannot open file");
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "cdlpp-basis" || version != 1) {
    throw std::runtime_error(path.string() + ": not a cdlpp-basis file");
  }
  Eigen::Index w_rows, w_cols, p_rows, p_cols;
  is >> tag >> w_rows >> w_cols;
  if (tag != "W") throw std::runtime_error(path.string() + ": malformed basis header");
  is >> tag >> p_rows >> p_cols;
  if (tag != "pre") throw std::runtime_error(path.string() + ": malformed basis header");

  LearnerConfig cfg;
  int pca_keep, scheme, structure;
  is >> tag >> cfg.d >> cfg.beta >> cfg.ridge >> pca_keep >> cfg.pca_dims >> cfg.zero_tol_rel >>
      scheme >> cfg.weights.heat_t >> cfg.lpp_knn >> structure;
  if (tag != "config" || !is) throw std::runtime_error(path.string() + ": malformed config line");
  cfg.pca_keep = static_cast<PcaKeep>(pca_keep);
  cfg.weights.scheme = static_cast<graph::WeightScheme>(scheme);
  cfg.lpp_structure = static_cast<graph::GraphStructure>(structure);

  ProjectionBasis basis;
  is >> tag;
  if (tag != "eigenvalues") throw std::runtime_error(path.string() + ": missing eigenvalues");
  basis.eigenvalues = read_matrix(is, 1, w_cols).transpose();
  is >> tag;
  if (tag != "basis") throw std::runtime_error(path.string() + ": missing basis block");
  basis.W = read_matrix(is, w_rows, w_cols);
  if (p_rows > 0 && p_cols > 0) {
    is >> tag;
    if (tag != "preprojection") throw std::runtime_error(path.string() + ": missing pre block");
    basis.pre = read_matrix(is, p_rows, p_cols);
  }
  return {std::move(basis), cfg};
}

}  // namespace cdlpp::subspace
