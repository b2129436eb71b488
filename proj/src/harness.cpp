#include "cdlpp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "cdlpp/image_io.hpp"

namespace cdlpp::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Seeded Box-Muller over mt19937_64; identical streams on every platform,
// unlike std::normal_distribution.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Pca: return "pca";
    case Method::Lda: return "lda";
    case Method::Lpp: return "lpp";
    case Method::Dlpp: return "dlpp";
    case Method::Cslpp: return "cslpp";
    case Method::Cdlpp: return "cdlpp";
    case Method::Lrc: return "lrc";
    case Method::Crc: return "crc";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::Pca, Method::Lda, Method::Lpp, Method::Dlpp, Method::Cslpp,
                   Method::Cdlpp, Method::Lrc, Method::Crc}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

bool is_subspace_method(Method m) { return m != Method::Lrc && m != Method::Crc; }

subspace::LearnerConfig ExperimentSpec::config_for(Method m) const {
  auto it = per_method.find(m);
  return it != per_method.end() ? it->second : learner;
}

double default_beta(int n_samples) { return n_samples >= 1500 ? 1.0 : 0.1; }

SampleMatrix make_gaussian_classes(const Matrix& informative_means, int per_class, int noise_dims,
                                   double sigma, std::uint64_t seed, double noise_sigma) {
  const int inf_dims = static_cast<int>(informative_means.rows());
  const int p = static_cast<int>(informative_means.cols());
  if (p < 2 || per_class < 1 || inf_dims < 1 || noise_dims < 0 || sigma <= 0.0 ||
      noise_sigma < 0.0) {
    throw std::invalid_argument("invalid synthetic dataset parameters");
  }
  if (noise_sigma == 0.0) noise_sigma = sigma;
  SampleMatrix ds;
  ds.p = p;
  ds.n = p * per_class;
  ds.l = inf_dims + noise_dims;
  ds.data.resize(ds.l, ds.n);
  ds.labels.resize(static_cast<size_t>(ds.n));
  GaussianSource gauss(seed);
  int col = 0;
  for (int c = 0; c < p; ++c) {
    for (int s = 0; s < per_class; ++s, ++col) {
      for (int i = 0; i < inf_dims; ++i) {
        ds.data(i, col) = informative_means(i, c) + sigma * gauss();
      }
      for (int i = 0; i < noise_dims; ++i) {
        ds.data(inf_dims + i, col) = noise_sigma * gauss();
      }
      ds.labels[static_cast<size_t>(col)] = c + 1;
    }
    ds.original_ids.push_back(c + 1);
  }
  return ds;
}

SampleMatrix make_gaussian_classes(const SyntheticSpec& spec) {
  if (spec.classes < 2 || spec.informative_dims < 1 || spec.mean_gap <= 0.0) {
    throw std::invalid_argument("invalid synthetic dataset parameters");
  }
  // Class p sits at the origin; class c < p sits on axis (c-1) mod inf at an
  // integer multiple of the gap, so the minimum pairwise mean distance is
  // exactly mean_gap * sigma.
  Matrix means = Matrix::Zero(spec.informative_dims, spec.classes);
  for (int c = 0; c + 1 < spec.classes; ++c) {
    int axis = c % spec.informative_dims;
    int multiple = 1 + c / spec.informative_dims;
    means(axis, c) = spec.mean_gap * spec.sigma * multiple;
  }
  return make_gaussian_classes(means, spec.per_class, spec.noise_dims, spec.sigma, spec.seed,
                               spec.noise_sigma);
}

SampleMatrix load_dataset(const ExperimentSpec& spec) {
  SampleMatrix ds;
  switch (spec.source.kind) {
    case DatasetSource::Kind::Csv:
      ds = dataset::load_matrix_file(spec.source.path);
      break;
    case DatasetSource::Kind::Images:
      ds = dataset::load_image_dir(spec.source.path);
      break;
    case DatasetSource::Kind::Synthetic:
      ds = make_gaussian_classes(spec.source.synthetic);
      break;
  }
  if (spec.feature == FeatureKind::Lbp) {
    ds = features::lbp_features(ds, spec.lbp);
  }
  return ds;
}

SplitPlan make_split(const ExperimentSpec& spec, const SampleMatrix& ds) {
  switch (spec.protocol.kind) {
    case Protocol::Kind::KFold: return dataset::kfold_split(ds, spec.protocol.param);
    case Protocol::Kind::LeaveOneOut: return dataset::leave_one_out_split(ds);
    case Protocol::Kind::FirstN: return dataset::first_n_per_class_split(ds, spec.protocol.param);
  }
  throw std::logic_error("unhandled protocol");
}

subspace::ProjectionBasis fit_method(Method m, const SampleMatrix& train,
                                     const subspace::LearnerConfig& cfg) {
  switch (m) {
    case Method::Pca: return subspace::fit_pca(train, cfg);
    case Method::Lda: return subspace::fit_lda(train, cfg);
    case Method::Lpp: return subspace::fit_lpp(train, cfg);
    case Method::Dlpp: return subspace::fit_dlpp(train, cfg);
    case Method::Cslpp: return subspace::fit_cslpp(train, cfg);
    case Method::Cdlpp: return subspace::fit_cdlpp(train, cfg);
    case Method::Lrc:
    case Method::Crc:
      throw std::logic_error("LRC/CRC are decision rules, not fitted learners");
  }
  throw std::logic_error("unhandled method");
}

namespace {

MethodResult run_method_cv(const ExperimentSpec& spec, const SampleMatrix& ds,
                           const SplitPlan& plan, Method m,
                           const subspace::LearnerConfig& cfg) {
  MethodResult result;
  result.method = m;
  for (size_t f = 0; f < plan.folds.size(); ++f) {
    const Fold& fold = plan.folds[f];
    try {
      SampleMatrix train = select_columns(ds, fold.train);
      SampleMatrix test = select_columns(ds, fold.test);
      FoldOutcome outcome;
      std::vector<int> predictions(static_cast<size_t>(test.n));

      if (is_subspace_method(m)) {
        auto start = Clock::now();
        subspace::ProjectionBasis basis = fit_method(m, train, cfg);
        result.train_seconds += seconds_since(start);
        result.retained_dim = basis.dim();
        Matrix train_proj = subspace::project(basis, train.data);
        Matrix test_proj = subspace::project(basis, test.data);
        classify::GalleryModel gallery = classify::GalleryModel::build(train_proj, train.labels);
        for (int j = 0; j < test.n; ++j) {
          predictions[static_cast<size_t>(j)] = classify::nn_classify(gallery, test_proj.col(j));
        }
      } else {
        auto start = Clock::now();
        classify::GalleryModel gallery = classify::GalleryModel::build(train.data, train.labels);
        result.train_seconds += seconds_since(start);
        result.retained_dim = ds.l;
        for (int j = 0; j < test.n; ++j) {
          predictions[static_cast<size_t>(j)] =
              m == Method::Lrc ? classify::lrc_classify(gallery, test.data.col(j))
                               : classify::crc_classify(gallery, test.data.col(j));
        }
      }

      int correct = 0;
      for (int j = 0; j < test.n; ++j) {
        int predicted = predictions[static_cast<size_t>(j)];
        if (predicted == test.labels[static_cast<size_t>(j)]) ++correct;
        outcome.predictions.push_back(
            {fold.test[static_cast<size_t>(j)], predicted, test.labels[static_cast<size_t>(j)]});
      }
      outcome.accuracy = static_cast<double>(correct) / test.n;
      result.folds.push_back(std::move(outcome));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(method_name(m) + " fold " + std::to_string(f + 1) + ": " +
                                  e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(method_name(m) + " fold " + std::to_string(f + 1) + ": " +
                               e.what());
    }
  }

  double mean = 0.0;
  for (const FoldOutcome& fold : result.folds) mean += fold.accuracy;
  mean /= static_cast<double>(result.folds.size());
  double var = 0.0;
  for (const FoldOutcome& fold : result.folds) {
    var += (fold.accuracy - mean) * (fold.accuracy - mean);
  }
  var /= static_cast<double>(result.folds.size());  // population variance
  result.accuracy_mean = mean;
  result.accuracy_std = std::sqrt(std::max(var, 0.0));
  return result;
}

subspace::LearnerConfig effective_config(const ExperimentSpec& spec, const SampleMatrix& ds,
                                         Method m) {
  subspace::LearnerConfig cfg = spec.config_for(m);
  if (spec.beta_auto) cfg.beta = default_beta(ds.n);
  return cfg;
}

template <typename T>
void require_strictly_increasing(const std::vector<T>& values, const char* what) {
  for (size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw std::invalid_argument(std::string(what) + " sweep list must be strictly increasing");
    }
  }
}

}  // namespace

ExperimentReport run_cv(const ExperimentSpec& spec, const SampleMatrix& ds) {
  if (spec.methods.empty()) {
    throw std::invalid_argument("experiment needs a non-empty method list");
  }
  SplitPlan plan = make_split(spec, ds);
  ExperimentReport report;
  report.fold_count = static_cast<int>(plan.folds.size());
  for (Method m : spec.methods) {
    report.methods.push_back(run_method_cv(spec, ds, plan, m, effective_config(spec, ds, m)));
  }
  return report;
}

ExperimentReport run_dim_sweep(const ExperimentSpec& spec, const SampleMatrix& ds) {
  if (spec.methods.empty() || spec.sweep_dims.empty()) {
    throw std::invalid_argument("dimension sweep needs methods and a dims list");
  }
  require_strictly_increasing(spec.sweep_dims, "dimension");
  for (Method m : spec.methods) {
    if (!is_subspace_method(m)) {
      throw std::invalid_argument("dimension sweep applies to subspace methods, got " +
                                  method_name(m));
    }
  }
  SplitPlan plan = make_split(spec, ds);
  ExperimentReport report;
  report.fold_count = static_cast<int>(plan.folds.size());
  for (Method m : spec.methods) {
    for (int d : spec.sweep_dims) {
      subspace::LearnerConfig cfg = effective_config(spec, ds, m);
      cfg.d = d;
      DimSweepPoint point;
      point.method = m;
      point.d = d;
      try {
        point.accuracy = run_method_cv(spec, ds, plan, m, cfg).accuracy_mean;
      } catch (const std::invalid_argument&) {
        point.attainable = false;  // d beyond the method's attainable rank
      }
      report.dim_curve.push_back(point);
    }
  }
  return report;
}

ExperimentReport run_beta_sweep(const ExperimentSpec& spec, const SampleMatrix& ds) {
  std::vector<double> betas = spec.sweep_betas;
  if (betas.empty()) betas.push_back(default_beta(ds.n));
  require_strictly_increasing(betas, "beta");
  for (double beta : betas) {
    if (beta < 0.0) throw std::invalid_argument("beta sweep values must be nonnegative");
  }
  SplitPlan plan = make_split(spec, ds);
  ExperimentReport report;
  report.fold_count = static_cast<int>(plan.folds.size());
  for (double beta : betas) {
    subspace::LearnerConfig cfg = spec.config_for(Method::Cdlpp);
    cfg.beta = beta;
    BetaSweepPoint point;
    point.beta = beta;
    point.accuracy = run_method_cv(spec, ds, plan, Method::Cdlpp, cfg).accuracy_mean;
    report.beta_curve.push_back(point);
  }
  return report;
}

void export_class_scatter(const ExperimentSpec& spec, const SampleMatrix& ds, Method method,
                          const std::filesystem::path& out_csv) {
  if (!is_subspace_method(method)) {
    throw std::invalid_argument("class scatter export needs a subspace method");
  }
  subspace::LearnerConfig cfg = effective_config(spec, ds, method);
  if (cfg.d == 0) cfg.d = std::max(1, ds.p - 1);
  if (cfg.d < 2) {
    throw std::invalid_argument("class scatter export needs d >= 2, got " +
                                std::to_string(cfg.d));
  }
  subspace::ProjectionBasis basis = fit_method(method, ds, cfg);
  Matrix centers = subspace::project(basis, graph::class_means(ds).U);

  std::ofstream os(out_csv);
  if (!os) throw std::runtime_error(out_csv.string() + ": cannot open for writing");
  os << std::setprecision(12);
  os << "class_id,y1,y2\n";
  for (Eigen::Index c = 0; c < centers.cols(); ++c) {
    os << (c + 1) << ',' << centers(0, c) << ',' << centers(1, c) << '\n';
  }
}

void export_bases(const subspace::ProjectionBasis& basis, int image_width, int image_height,
                  int count, const std::filesystem::path& out_dir, const std::string& tag) {
  if (basis.input_dim() != image_width * image_height) {
    throw std::invalid_argument("basis input dimension " + std::to_string(basis.input_dim()) +
                                " does not match image shape " + std::to_string(image_width) +
                                "x" + std::to_string(image_height));
  }
  std::filesystem::create_directories(out_dir);
  Matrix effective = basis.effective();
  int k = std::min(count, basis.dim());

  for (int b = 0; b < k; ++b) {
    Vector column = effective.col(b);
    double lo = column.minCoeff();
    double hi = column.maxCoeff();
    GrayImage img;
    img.width = image_width;
    img.height = image_height;
    img.pixels.resize(static_cast<size_t>(basis.input_dim()));
    for (int i = 0; i < basis.input_dim(); ++i) {
      double scaled = hi > lo ? 255.0 * (column[i] - lo) / (hi - lo) : 0.0;
      img.pixels[static_cast<size_t>(i)] = static_cast<std::uint8_t>(std::llround(scaled));
    }
    write_pgm(out_dir / (tag + "_basis" + std::to_string(b + 1) + ".pgm"), img);
  }

  std::ofstream os(out_dir / (tag + "_bases_abs.csv"));
  if (!os) throw std::runtime_error("cannot write bases CSV");
  os << std::setprecision(12);
  os << "component";
  for (int b = 0; b < k; ++b) os << ",basis_" << (b + 1);
  os << '\n';
  for (int i = 0; i < basis.input_dim(); ++i) {
    os << i;
    for (int b = 0; b < k; ++b) os << ',' << std::abs(effective(i, b));
    os << '\n';
  }
}

double gini_index(const Vector& values) {
  std::vector<double> sorted(values.data(), values.data() + values.size());
  for (double v : sorted) {
    if (v < 0.0) throw std::invalid_argument("gini index needs nonnegative values");
  }
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double total = 0.0;
  double weighted = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += static_cast<double>(i + 1) * sorted[i];
  }
  if (total <= 0.0) return 0.0;
  return 2.0 * weighted / (m * total) - (m + 1.0) / m;
}

void write_cv_csv(const ExperimentReport& report, std::ostream& os) {
  os << std::setprecision(12);
  os << "method,folds,accuracy_mean,accuracy_std,retained_dim,train_seconds\n";
  for (const MethodResult& r : report.methods) {
    os << method_name(r.method) << ',' << report.fold_count << ',' << r.accuracy_mean << ','
       << r.accuracy_std << ',' << r.retained_dim << ',' << r.train_seconds << '\n';
  }
}

void write_dim_sweep_csv(const ExperimentReport& report, std::ostream& os) {
  os << std::setprecision(12);
  os << "method,d,accuracy,status\n";
  for (const DimSweepPoint& p : report.dim_curve) {
    os << method_name(p.method) << ',' << p.d << ',';
    if (p.attainable) os << p.accuracy << ",ok\n";
    else os << ",unattainable\n";
  }
}

void write_beta_sweep_csv(const ExperimentReport& report, std::ostream& os) {
  os << std::setprecision(12);
  os << "beta,accuracy\n";
  for (const BetaSweepPoint& p : report.beta_curve) {
    os << p.beta << ',' << p.accuracy << '\n';
  }
}

void write_timing_csv(const ExperimentReport& report, std::ostream& os) {
  os << std::setprecision(12);
  os << "method,folds,train_seconds\n";
  for (const MethodResult& r : report.methods) {
    os << method_name(r.method) << ',' << report.fold_count << ',' << r.train_seconds << '\n';
  }
}

std::string summary_table(const ExperimentReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "method" << std::setw(22) << "accuracy"
     << std::setw(6) << "d" << "train_s\n";
  os << std::fixed;
  for (const MethodResult& r : report.methods) {
    std::ostringstream acc;
    acc << std::fixed << std::setprecision(2) << 100.0 * r.accuracy_mean << "% +/- "
        << 100.0 * r.accuracy_std << "%";
    os << std::left << std::setw(8) << method_name(r.method) << std::setw(22) << acc.str()
       << std::setw(6) << r.retained_dim << std::setprecision(4) << r.train_seconds << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Config file handling: `key = value` lines, '#' comments.

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_number(const std::string& value, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' has non-numeric value '" + value + "'");
  }
}

int parse_int(const std::string& value, const std::string& key) {
  double v = parse_number(value, key);
  if (v != std::rint(v)) {
    throw std::invalid_argument("config key '" + key + "' needs an integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

void apply_weighting_string(subspace::LearnerConfig& cfg, const std::string& value) {
  if (value == "dot-product") {
    cfg.weights = {graph::WeightScheme::DotProduct, 0.0};
  } else if (value == "dot-product-raw") {
    cfg.weights = {graph::WeightScheme::DotProductUnnormalized, 0.0};
  } else if (value == "heat" || value == "heat:auto") {
    cfg.weights = {graph::WeightScheme::HeatKernel, 0.0};
  } else if (value.rfind("heat:", 0) == 0) {
    cfg.weights = {graph::WeightScheme::HeatKernel, parse_number(value.substr(5), "weighting")};
  } else {
    throw std::invalid_argument("unknown weighting '" + value + "'");
  }
}

namespace {

std::string weighting_string(const subspace::LearnerConfig& cfg) {
  switch (cfg.weights.scheme) {
    case graph::WeightScheme::DotProduct: return "dot-product";
    case graph::WeightScheme::DotProductUnnormalized: return "dot-product-raw";
    case graph::WeightScheme::HeatKernel:
      if (cfg.weights.heat_t == 0.0) return "heat:auto";
      return "heat:" + std::to_string(cfg.weights.heat_t);
  }
  return "dot-product";
}

}  // namespace

void apply_pca_keep_string(subspace::LearnerConfig& cfg, const std::string& value) {
  if (value == "none") {
    cfg.pca_keep = subspace::PcaKeep::None;
  } else if (value == "rank-safe") {
    cfg.pca_keep = subspace::PcaKeep::RankSafe;
  } else if (value.rfind("explicit:", 0) == 0) {
    cfg.pca_keep = subspace::PcaKeep::Explicit;
    cfg.pca_dims = parse_int(value.substr(9), "pca_keep");
  } else {
    throw std::invalid_argument("unknown pca_keep '" + value + "'");
  }
}

namespace {

std::string pca_keep_string(const subspace::LearnerConfig& cfg) {
  switch (cfg.pca_keep) {
    case subspace::PcaKeep::None: return "none";
    case subspace::PcaKeep::RankSafe: return "rank-safe";
    case subspace::PcaKeep::Explicit: return "explicit:" + std::to_string(cfg.pca_dims);
  }
  return "rank-safe";
}

}  // namespace

Protocol parse_protocol(const std::string& value) {
  Protocol protocol;
  if (value == "loo" || value == "leave-one-out") {
    protocol.kind = Protocol::Kind::LeaveOneOut;
    protocol.param = 0;
  } else if (value.rfind("kfold:", 0) == 0) {
    protocol.kind = Protocol::Kind::KFold;
    protocol.param = parse_int(value.substr(6), "protocol");
  } else if (value.rfind("first-n:", 0) == 0) {
    protocol.kind = Protocol::Kind::FirstN;
    protocol.param = parse_int(value.substr(8), "protocol");
  } else {
    throw std::invalid_argument("unknown protocol '" + value + "'");
  }
  return protocol;
}

namespace {

std::string protocol_string(const Protocol& protocol) {
  switch (protocol.kind) {
    case Protocol::Kind::KFold: return "kfold:" + std::to_string(protocol.param);
    case Protocol::Kind::LeaveOneOut: return "loo";
    case Protocol::Kind::FirstN: return "first-n:" + std::to_string(protocol.param);
  }
  return "kfold:5";
}

// Per-method override keys look like `cdlpp.beta = 0.5`.
void apply_method_override(ExperimentSpec& spec, const std::string& method_part,
                           const std::string& field, const std::string& value,
                           const std::string& key) {
  Method m = method_from_name(method_part);
  if (spec.per_method.find(m) == spec.per_method.end()) {
    spec.per_method[m] = spec.learner;
  }
  subspace::LearnerConfig& cfg = spec.per_method[m];
  if (field == "d") cfg.d = parse_int(value, key);
  else if (field == "beta") cfg.beta = parse_number(value, key);
  else if (field == "ridge") cfg.ridge = parse_number(value, key);
  else if (field == "knn") cfg.lpp_knn = parse_int(value, key);
  else throw std::invalid_argument("unknown per-method config field '" + key + "'");
}

}  // namespace

DatasetSource parse_dataset_source(const std::string& text) {
  DatasetSource source;
  if (text.rfind("csv:", 0) == 0) {
    source.kind = DatasetSource::Kind::Csv;
    source.path = text.substr(4);
  } else if (text.rfind("images:", 0) == 0) {
    source.kind = DatasetSource::Kind::Images;
    source.path = text.substr(7);
  } else if (text.rfind("synthetic:", 0) == 0) {
    source.kind = DatasetSource::Kind::Synthetic;
    for (const std::string& item : split(text.substr(10), ',')) {
      if (item.empty()) continue;
      size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("synthetic spec item '" + item + "' is not key=value");
      }
      std::string key = trim(item.substr(0, eq));
      std::string value = trim(item.substr(eq + 1));
      if (key == "classes" || key == "p") source.synthetic.classes = parse_int(value, key);
      else if (key == "per_class") source.synthetic.per_class = parse_int(value, key);
      else if (key == "informative") source.synthetic.informative_dims = parse_int(value, key);
      else if (key == "noise") source.synthetic.noise_dims = parse_int(value, key);
      else if (key == "gap") source.synthetic.mean_gap = parse_number(value, key);
      else if (key == "sigma") source.synthetic.sigma = parse_number(value, key);
      else if (key == "noise_sigma") source.synthetic.noise_sigma = parse_number(value, key);
      else if (key == "seed") source.synthetic.seed = static_cast<std::uint64_t>(parse_number(value, key));
      else throw std::invalid_argument("unknown synthetic spec key '" + key + "'");
    }
  } else {
    throw std::invalid_argument("dataset must start with csv:, images: or synthetic:, got '" +
                                text + "'");
  }
  return source;
}

std::string dataset_source_string(const DatasetSource& source) {
  switch (source.kind) {
    case DatasetSource::Kind::Csv: return "csv:" + source.path.string();
    case DatasetSource::Kind::Images: return "images:" + source.path.string();
    case DatasetSource::Kind::Synthetic: {
      std::ostringstream os;
      const SyntheticSpec& s = source.synthetic;
      os << "synthetic:classes=" << s.classes << ",per_class=" << s.per_class
         << ",informative=" << s.informative_dims << ",noise=" << s.noise_dims << ",gap="
         << s.mean_gap << ",sigma=" << s.sigma << ",noise_sigma=" << s.noise_sigma
         << ",seed=" << s.seed;
      return os.str();
    }
  }
  return "";
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config file");

  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    size_t dot = key.find('.');
    if (dot != std::string::npos) {
      apply_method_override(spec, key.substr(0, dot), key.substr(dot + 1), value, key);
      continue;
    }

    if (key == "dataset") {
      spec.source = parse_dataset_source(value);
    } else if (key == "feature") {
      if (value == "raw") spec.feature = FeatureKind::Raw;
      else if (value == "lbp") spec.feature = FeatureKind::Lbp;
      else throw std::invalid_argument("unknown feature '" + value + "'");
    } else if (key == "lbp_grid") {
      size_t x = value.find('x');
      if (x == std::string::npos) throw std::invalid_argument("lbp_grid must look like 8x8");
      spec.lbp.grid_rows = parse_int(value.substr(0, x), key);
      spec.lbp.grid_cols = parse_int(value.substr(x + 1), key);
    } else if (key == "methods") {
      spec.methods.clear();
      for (const std::string& name : split(value, ',')) {
        if (!name.empty()) spec.methods.push_back(method_from_name(name));
      }
    } else if (key == "protocol") {
      spec.protocol = parse_protocol(value);
    } else if (key == "d") {
      spec.learner.d = parse_int(value, key);
    } else if (key == "beta") {
      if (value == "auto") spec.beta_auto = true;
      else spec.learner.beta = parse_number(value, key);
    } else if (key == "ridge") {
      spec.learner.ridge = parse_number(value, key);
    } else if (key == "zero_tol") {
      spec.learner.zero_tol_rel = parse_number(value, key);
    } else if (key == "pca_keep") {
      apply_pca_keep_string(spec.learner, value);
    } else if (key == "weighting") {
      apply_weighting_string(spec.learner, value);
    } else if (key == "knn") {
      spec.learner.lpp_knn = parse_int(value, key);
    } else if (key == "lpp_structure") {
      if (value == "knn") spec.learner.lpp_structure = graph::GraphStructure::Knn;
      else if (value == "complete") spec.learner.lpp_structure = graph::GraphStructure::Complete;
      else throw std::invalid_argument("unknown lpp_structure '" + value + "'");
    } else if (key == "dims") {
      spec.sweep_dims.clear();
      for (const std::string& v : split(value, ',')) {
        if (!v.empty()) spec.sweep_dims.push_back(parse_int(v, key));
      }
    } else if (key == "betas") {
      spec.sweep_betas.clear();
      for (const std::string& v : split(value, ',')) {
        if (!v.empty()) spec.sweep_betas.push_back(parse_number(v, key));
      }
    } else if (key == "out") {
      spec.out_dir = value;
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_number(value, key));
    } else {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": unknown config key '" + key + "'");
    }
  }
  return spec;
}

void save_config(const ExperimentSpec& spec, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << std::setprecision(17);
  os << "dataset = " << dataset_source_string(spec.source) << '\n';
  os << "feature = " << (spec.feature == FeatureKind::Lbp ? "lbp" : "raw") << '\n';
  os << "lbp_grid = " << spec.lbp.grid_rows << 'x' << spec.lbp.grid_cols << '\n';
  os << "methods = ";
  for (size_t i = 0; i < spec.methods.size(); ++i) {
    if (i > 0) os << ',';
    os << method_name(spec.methods[i]);
  }
  os << '\n';
  os << "protocol = " << protocol_string(spec.protocol) << '\n';
  os << "d = " << spec.learner.d << '\n';
  if (spec.beta_auto) os << "beta = auto\n";
  else os << "beta = " << spec.learner.beta << '\n';
  os << "ridge = " << spec.learner.ridge << '\n';
  os << "zero_tol = " << spec.learner.zero_tol_rel << '\n';
  os << "pca_keep = " << pca_keep_string(spec.learner) << '\n';
  os << "weighting = " << weighting_string(spec.learner) << '\n';
  os << "knn = " << spec.learner.lpp_knn << '\n';
  os << "lpp_structure = "
     << (spec.learner.lpp_structure == graph::GraphStructure::Complete ? "complete" : "knn")
     << '\n';
  if (!spec.sweep_dims.empty()) {
    os << "dims = ";
    for (size_t i = 0; i < spec.sweep_dims.size(); ++i) {
      if (i > 0) os << ',';
      os << spec.sweep_dims[i];
    }
    os << '\n';
  }
  if (!spec.sweep_betas.empty()) {
    os << "betas = ";
    for (size_t i = 0; i < spec.sweep_betas.size(); ++i) {
      if (i > 0) os << ',';
      os << spec.sweep_betas[i];
    }
    os << '\n';
  }
  if (!spec.out_dir.empty()) os << "out = " << spec.out_dir.string() << '\n';
  os << "seed = " << spec.seed << '\n';
  for (const auto& [m, cfg] : spec.per_method) {
    os << method_name(m) << ".d = " << cfg.d << '\n';
    os << method_name(m) << ".beta = " << cfg.beta << '\n';
    os << method_name(m) << ".ridge = " << cfg.ridge << '\n';
    os << method_name(m) << ".knn = " << cfg.lpp_knn << '\n';
  }
}

}  // namespace cdlpp::harness
