#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>

#include "cdlpp/classify.hpp"
#include "cdlpp/dataset.hpp"
#include "cdlpp/features.hpp"
#include "cdlpp/subspace.hpp"

namespace cdlpp::harness {

enum class Method { Pca, Lda, Lpp, Dlpp, Cslpp, Cdlpp, Lrc, Crc };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
// True for learners that project before 1-NN; LRC/CRC classify raw features.
bool is_subspace_method(Method m);

enum class FeatureKind { Raw, Lbp };

/// Gaussian class generator: class means live in the first informative_dims
/// coordinates with minimum pairwise gap mean_gap * sigma; the remaining
/// noise_dims carry zero-mean noise only. Sampling is seeded Box-Muller, so
/// outputs are identical across platforms for a given spec.
struct SyntheticSpec {
  int classes = 5;
  int per_class = 20;
  int informative_dims = 4;
  int noise_dims = 46;
  double mean_gap = 8.0;     // in units of sigma
  double sigma = 1.0;        // within-class sigma of the informative dims
  double noise_sigma = 0.0;  // sigma of the pure-noise dims; 0 = same as sigma
  std::uint64_t seed = 7;
};

SampleMatrix make_gaussian_classes(const SyntheticSpec& spec);
// Explicit class means (informative coordinates only, one column per class).
SampleMatrix make_gaussian_classes(const Matrix& informative_means, int per_class,
                                   int noise_dims, double sigma, std::uint64_t seed,
                                   double noise_sigma = 0.0);

struct DatasetSource {
  enum class Kind { Csv, Images, Synthetic };
  Kind kind = Kind::Synthetic;
  std::filesystem::path path;
  SyntheticSpec synthetic;
};

struct Protocol {
  enum class Kind { KFold, LeaveOneOut, FirstN };
  Kind kind = Kind::KFold;
  int param = 5;  // k for KFold, n_train for FirstN
};

struct ExperimentSpec {
  DatasetSource source;
  FeatureKind feature = FeatureKind::Raw;
  features::LbpConfig lbp;
  std::vector<Method> methods;
  Protocol protocol;
  subspace::LearnerConfig learner;
  std::map<Method, subspace::LearnerConfig> per_method;  // overrides of `learner`
  bool beta_auto = false;       // pick beta from the dataset-size default policy
  std::vector<int> sweep_dims;
  std::vector<double> sweep_betas;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;  // reserved; current protocols are deterministic

  subspace::LearnerConfig config_for(Method m) const;
};

// beta = 0.1 for small datasets, 1 for large (cut at 1500 samples).
double default_beta(int n_samples);

struct PredictionRecord {
  int sample_index;
  int predicted;
  int actual;
};

struct FoldOutcome {
  double accuracy = 0.0;
  std::vector<PredictionRecord> predictions;
};

struct MethodResult {
  Method method = Method::Pca;
  std::vector<FoldOutcome> folds;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // population std over fold accuracies
  int retained_dim = 0;
  double train_seconds = 0.0;  // wall clock, summed over folds
};

struct DimSweepPoint {
  Method method = Method::Pca;
  int d = 0;
  double accuracy = 0.0;
  bool attainable = true;
};

struct BetaSweepPoint {
  double beta = 0.0;
  double accuracy = 0.0;
};

struct ExperimentReport {
  std::vector<MethodResult> methods;
  int fold_count = 0;
  std::vector<DimSweepPoint> dim_curve;
  std::vector<BetaSweepPoint> beta_curve;
};

SampleMatrix load_dataset(const ExperimentSpec& spec);
SplitPlan make_split(const ExperimentSpec& spec, const SampleMatrix& ds);

// Fits one subspace learner (Lrc/Crc are not fitted learners).
subspace::ProjectionBasis fit_method(Method m, const SampleMatrix& train,
                                     const subspace::LearnerConfig& cfg);

ExperimentReport run_cv(const ExperimentSpec& spec, const SampleMatrix& ds);
ExperimentReport run_dim_sweep(const ExperimentSpec& spec, const SampleMatrix& ds);
ExperimentReport run_beta_sweep(const ExperimentSpec& spec, const SampleMatrix& ds);

// Projects class means onto the first two bases of `method` fitted on the
// full dataset; rows are class_id,y1,y2.
void export_class_scatter(const ExperimentSpec& spec, const SampleMatrix& ds, Method method,
                          const std::filesystem::path& out_csv);

// First `count` bases reshaped to width x height (min -> 0, max -> 255) as
// PGM images plus a CSV of per-component |w| values.
void export_bases(const subspace::ProjectionBasis& basis, int image_width, int image_height,
                  int count, const std::filesystem::path& out_dir, const std::string& tag);

// Sparseness index of a nonnegative profile: Gini coefficient in [0, 1),
// higher = mass concentrated on fewer components.
double gini_index(const Vector& values);

void write_cv_csv(const ExperimentReport& report, std::ostream& os);
void write_dim_sweep_csv(const ExperimentReport& report, std::ostream& os);
void write_beta_sweep_csv(const ExperimentReport& report, std::ostream& os);
void write_timing_csv(const ExperimentReport& report, std::ostream& os);
// Text table mirroring "mean% +/- std% (d)" per method.
std::string summary_table(const ExperimentReport& report);

ExperimentSpec load_config(const std::filesystem::path& path);
void save_config(const ExperimentSpec& spec, const std::filesystem::path& path);

// Parsers shared by the config file and the CLI flags.
DatasetSource parse_dataset_source(const std::string& text);
std::string dataset_source_string(const DatasetSource& source);
Protocol parse_protocol(const std::string& text);
void apply_weighting_string(subspace::LearnerConfig& cfg, const std::string& text);
void apply_pca_keep_string(subspace::LearnerConfig& cfg, const std::string& text);

}  // namespace cdlpp::harness
