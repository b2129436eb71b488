#include "cdlpp/classify.hpp"

#include <cmath>
#include <limits>

namespace cdlpp::classify {

GalleryModel GalleryModel::build(const Matrix& features, const std::vector<int>& labels,
                                 double crc_lambda) {
  if (features.cols() == 0) {
    throw std::invalid_argument("gallery needs at least one training column");
  }
  if (static_cast<Eigen::Index>(labels.size()) != features.cols()) {
    throw std::invalid_argument("gallery label count does not match column count");
  }
  GalleryModel g;
  g.features = features;
  g.labels = labels;
  int p = 0;
  for (int label : labels) {
    if (label < 1) throw std::invalid_argument("gallery labels must be >= 1");
    p = std::max(p, label);
  }
  g.class_columns.resize(p);
  for (size_t i = 0; i < labels.size(); ++i) {
    g.class_columns[labels[i] - 1].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < p; ++c) {
    if (g.class_columns[c].empty()) {
      throw std::invalid_argument("class " + std::to_string(c + 1) + " has no training columns");
    }
  }
  if (crc_lambda < 0.0) {
    throw std::invalid_argument("crc lambda must be positive");
  }
  if (crc_lambda == 0.0) {
    // Scale-aware default: 1e-3 * trace(X^T X) / n_train.
    double trace = features.squaredNorm();
    crc_lambda = 1e-3 * trace / static_cast<double>(features.cols());
    if (crc_lambda <= 0.0) crc_lambda = 1e-3;
  }
  g.crc_lambda = crc_lambda;
  return g;
}

namespace {

void require_query_dim(const GalleryModel& g, const Vector& query) {
  if (query.size() != g.features.rows()) {
    throw std::invalid_argument("query has " + std::to_string(query.size()) +
                                " components, gallery features have " +
                                std::to_string(g.features.rows()));
  }
}

}  // namespace

int nn_classify(const GalleryModel& gallery, const Vector& query) {
  require_query_dim(gallery, query);
  double best = std::numeric_limits<double>::infinity();
  int best_label = gallery.labels[0];
  for (Eigen::Index j = 0; j < gallery.features.cols(); ++j) {
    double dist = (gallery.features.col(j) - query).squaredNorm();
    if (dist < best) {
      best = dist;
      best_label = gallery.labels[static_cast<size_t>(j)];
    }
  }
  return best_label;
}

Vector crc_solve(const GalleryModel& gallery, const Vector& query) {
  require_query_dim(gallery, query);
  const Matrix& X = gallery.features;
  Matrix G = X.transpose() * X;
  G.diagonal().array() += gallery.crc_lambda;
  Vector rhs = X.transpose() * query;
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("CRC normal matrix factorization failed");
  }
  Vector p_hat = llt.solve(rhs);
  // One refinement step, then enforce the residual contract.
  Vector residual = rhs - G * p_hat;
  p_hat += llt.solve(residual);
  double res_norm = (G * p_hat - rhs).norm();
  if (res_norm > 1e-8 * rhs.norm()) {
    throw std::runtime_error("CRC solve residual " + std::to_string(res_norm) +
                             " exceeds the accepted bound");
  }
  return p_hat;
}

int crc_classify(const GalleryModel& gallery, const Vector& query, bool regularized_residual) {
  Vector p_hat = crc_solve(gallery, query);
  double best = std::numeric_limits<double>::infinity();
  int best_class = 1;
  for (size_t c = 0; c < gallery.class_columns.size(); ++c) {
    Vector reconstruction = Vector::Zero(query.size());
    double coef_norm_sq = 0.0;
    for (int col : gallery.class_columns[c]) {
      reconstruction += p_hat[col] * gallery.features.col(col);
      coef_norm_sq += p_hat[col] * p_hat[col];
    }
    double r = (query - reconstruction).norm();
    if (regularized_residual) {
      double coef_norm = std::sqrt(coef_norm_sq);
      r = coef_norm > 0.0 ? r / coef_norm : std::numeric_limits<double>::infinity();
    }
    if (r < best) {
      best = r;
      best_class = static_cast<int>(c) + 1;
    }
  }
  return best_class;
}

int lrc_classify(const GalleryModel& gallery, const Vector& query) {
  require_query_dim(gallery, query);
  double best = std::numeric_limits<double>::infinity();
  int best_class = 1;
  for (size_t c = 0; c < gallery.class_columns.size(); ++c) {
    const auto& cols = gallery.class_columns[c];
    Matrix Xc(gallery.features.rows(), cols.size());
    for (size_t j = 0; j < cols.size(); ++j) Xc.col(static_cast<Eigen::Index>(j)) = gallery.features.col(cols[j]);
    Matrix G = Xc.transpose() * Xc;
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success) {
      G.diagonal().array() += 1e-10;  // ridge fallback for rank-deficient classes
      llt.compute(G);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("LRC class normal matrix is not positive definite");
      }
    }
    Vector coeffs = llt.solve(Xc.transpose() * query);
    double r = (query - Xc * coeffs).norm();
    if (r < best) {
      best = r;
      best_class = static_cast<int>(c) + 1;
    }
  }
  return best_class;
}

}  // namespace cdlpp::classify
