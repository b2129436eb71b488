#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cdlpp/harness.hpp"

namespace {

using namespace cdlpp;

struct CliOverrides {
  std::string config;
  std::string dataset;
  std::string feature;
  std::string methods;
  std::string method;  // scatter/bases target
  std::string protocol;
  std::string beta;
  std::string pca_keep;
  std::string weighting;
  std::string lbp_grid;
  std::string dims;
  std::string betas;
  std::string out;
  int d = -1;
  int knn = -1;
  int count = 5;
  double ridge = -1.0;
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config, "key = value experiment config file");
  cmd->add_option("--dataset", o.dataset, "csv:<path> | images:<dir> | synthetic:<k=v,...>");
  cmd->add_option("--feature", o.feature, "raw | lbp");
  cmd->add_option("--lbp-grid", o.lbp_grid, "LBP pooling grid, e.g. 8x8");
  cmd->add_option("--methods", o.methods, "comma list: pca,lda,lpp,dlpp,cslpp,cdlpp,lrc,crc");
  cmd->add_option("--protocol", o.protocol, "kfold:<k> | loo | first-n:<n>");
  cmd->add_option("--d", o.d, "retained dimension (0 = p-1 default)");
  cmd->add_option("--beta", o.beta, "collaboration weight, or 'auto'");
  cmd->add_option("--ridge", o.ridge, "relative ridge for singular denominators");
  cmd->add_option("--pca-keep", o.pca_keep, "none | rank-safe | explicit:<k>");
  cmd->add_option("--weighting", o.weighting, "dot-product | dot-product-raw | heat[:t]");
  cmd->add_option("--knn", o.knn, "LPP graph neighborhood size");
  cmd->add_option("--dims", o.dims, "comma list of sweep dimensions");
  cmd->add_option("--betas", o.betas, "comma list of sweep betas");
  cmd->add_option("--out", o.out, "output directory");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

harness::ExperimentSpec build_spec(const CliOverrides& o) {
  harness::ExperimentSpec spec;
  if (!o.config.empty()) spec = harness::load_config(o.config);
  if (!o.dataset.empty()) spec.source = harness::parse_dataset_source(o.dataset);
  if (!o.feature.empty()) {
    if (o.feature == "raw") spec.feature = harness::FeatureKind::Raw;
    else if (o.feature == "lbp") spec.feature = harness::FeatureKind::Lbp;
    else throw std::invalid_argument("unknown feature '" + o.feature + "'");
  }
  if (!o.lbp_grid.empty()) {
    size_t x = o.lbp_grid.find('x');
    if (x == std::string::npos) throw std::invalid_argument("--lbp-grid must look like 8x8");
    spec.lbp.grid_rows = std::stoi(o.lbp_grid.substr(0, x));
    spec.lbp.grid_cols = std::stoi(o.lbp_grid.substr(x + 1));
  }
  if (!o.methods.empty()) {
    spec.methods.clear();
    for (const std::string& name : split_list(o.methods)) {
      spec.methods.push_back(harness::method_from_name(name));
    }
  }
  if (!o.protocol.empty()) spec.protocol = harness::parse_protocol(o.protocol);
  if (o.d >= 0) spec.learner.d = o.d;
  if (!o.beta.empty()) {
    if (o.beta == "auto") {
      spec.beta_auto = true;
    } else {
      spec.beta_auto = false;
      spec.learner.beta = std::stod(o.beta);
    }
  }
  if (o.ridge >= 0.0) spec.learner.ridge = o.ridge;
  if (!o.pca_keep.empty()) harness::apply_pca_keep_string(spec.learner, o.pca_keep);
  if (!o.weighting.empty()) harness::apply_weighting_string(spec.learner, o.weighting);
  if (o.knn >= 1) spec.learner.lpp_knn = o.knn;
  if (!o.dims.empty()) {
    spec.sweep_dims.clear();
    for (const std::string& v : split_list(o.dims)) spec.sweep_dims.push_back(std::stoi(v));
  }
  if (!o.betas.empty()) {
    spec.sweep_betas.clear();
    for (const std::string& v : split_list(o.betas)) spec.sweep_betas.push_back(std::stod(v));
  }
  if (!o.out.empty()) spec.out_dir = o.out;
  if (spec.out_dir.empty()) spec.out_dir = "bench_out";

  // Per-method overrides from the config file stay; flags apply to the shared
  // config only.
  return spec;
}

std::filesystem::path prepare_out_dir(const harness::ExperimentSpec& spec) {
  std::filesystem::create_directories(spec.out_dir);
  harness::save_config(spec, spec.out_dir / "config_used.ini");
  return spec.out_dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << content;
}

template <typename WriteFn>
void write_csv_file(const std::filesystem::path& path, WriteFn&& fn) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  fn(os);
}

int run_cv_command(const CliOverrides& o, bool timing_only) {
  harness::ExperimentSpec spec = build_spec(o);
  SampleMatrix ds = harness::load_dataset(spec);
  harness::ExperimentReport report = harness::run_cv(spec, ds);
  auto out = prepare_out_dir(spec);
  write_csv_file(out / "cv_summary.csv",
                 [&](std::ostream& os) { harness::write_cv_csv(report, os); });
  write_csv_file(out / "timing.csv",
                 [&](std::ostream& os) { harness::write_timing_csv(report, os); });
  std::string table = harness::summary_table(report);
  write_file(out / "summary.txt", table);
  if (timing_only) {
    std::ostringstream os;
    harness::write_timing_csv(report, os);
    std::cout << os.str();
  } else {
    std::cout << table;
  }
  return 0;
}

int run_dim_sweep_command(const CliOverrides& o) {
  harness::ExperimentSpec spec = build_spec(o);
  SampleMatrix ds = harness::load_dataset(spec);
  harness::ExperimentReport report = harness::run_dim_sweep(spec, ds);
  auto out = prepare_out_dir(spec);
  write_csv_file(out / "dim_sweep.csv",
                 [&](std::ostream& os) { harness::write_dim_sweep_csv(report, os); });
  std::ostringstream os;
  harness::write_dim_sweep_csv(report, os);
  std::cout << os.str();
  return 0;
}

int run_beta_sweep_command(const CliOverrides& o) {
  harness::ExperimentSpec spec = build_spec(o);
  SampleMatrix ds = harness::load_dataset(spec);
  harness::ExperimentReport report = harness::run_beta_sweep(spec, ds);
  auto out = prepare_out_dir(spec);
  write_csv_file(out / "beta_sweep.csv",
                 [&](std::ostream& os) { harness::write_beta_sweep_csv(report, os); });
  std::ostringstream os;
  harness::write_beta_sweep_csv(report, os);
  std::cout << os.str();
  return 0;
}

int run_scatter_command(const CliOverrides& o) {
  if (o.method.empty()) throw std::invalid_argument("scatter needs --method");
  harness::ExperimentSpec spec = build_spec(o);
  SampleMatrix ds = harness::load_dataset(spec);
  harness::Method m = harness::method_from_name(o.method);
  auto out = prepare_out_dir(spec);
  std::filesystem::path csv = out / ("scatter_" + o.method + ".csv");
  harness::export_class_scatter(spec, ds, m, csv);
  std::cout << "wrote " << csv.string() << "\n";
  return 0;
}

int run_bases_command(const CliOverrides& o) {
  if (o.method.empty()) throw std::invalid_argument("bases needs --method");
  harness::ExperimentSpec spec = build_spec(o);
  SampleMatrix ds = harness::load_dataset(spec);
  if (ds.image_width == 0 || ds.image_height == 0) {
    throw std::invalid_argument("bases export needs image-backed raw features");
  }
  harness::Method m = harness::method_from_name(o.method);
  subspace::LearnerConfig cfg = spec.config_for(m);
  if (spec.beta_auto) cfg.beta = harness::default_beta(ds.n);
  subspace::ProjectionBasis basis = harness::fit_method(m, ds, cfg);
  auto out = prepare_out_dir(spec);
  harness::export_bases(basis, ds.image_width, ds.image_height, o.count, out, o.method);
  subspace::save_basis(out / (o.method + "_basis.txt"), basis, cfg);
  std::cout << "wrote " << o.count << " basis images to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subspace-learning benchmark harness (CDLPP and its lineage)"};
  app.require_subcommand(1);

  CliOverrides o;
  CLI::App* cv = app.add_subcommand("cv", "cross-validation accuracy table");
  CLI::App* dim = app.add_subcommand("dim-sweep", "accuracy across retained dimensions");
  CLI::App* beta = app.add_subcommand("beta-sweep", "CDLPP accuracy across beta values");
  CLI::App* scatter = app.add_subcommand("scatter", "2-D projected class centers");
  CLI::App* bases = app.add_subcommand("bases", "basis images and |w| profiles");
  CLI::App* timing = app.add_subcommand("timing", "per-method training times");
  for (CLI::App* cmd : {cv, dim, beta, scatter, bases, timing}) add_common_options(cmd, o);
  scatter->add_option("--method", o.method, "method to fit");
  bases->add_option("--method", o.method, "method to fit");
  bases->add_option("--count", o.count, "number of bases to export");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cv->parsed()) return run_cv_command(o, false);
    if (dim->parsed()) return run_dim_sweep_command(o);
    if (beta->parsed()) return run_beta_sweep_command(o);
    if (scatter->parsed()) return run_scatter_command(o);
    if (bases->parsed()) return run_bases_command(o);
    if (timing->parsed()) return run_cv_command(o, true);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
