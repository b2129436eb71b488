#include "cdlpp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cdlpp/image_io.hpp"

namespace cdlpp::dataset {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

// Assigns contiguous ids 1..p in first-appearance order.
struct LabelRemap {
  std::map<int, int> to_contiguous;
  std::vector<int> original;

  int map(int raw) {
    auto it = to_contiguous.find(raw);
    if (it != to_contiguous.end()) return it->second;
    int id = static_cast<int>(original.size()) + 1;
    to_contiguous.emplace(raw, id);
    original.push_back(raw);
    return id;
  }
};

}  // namespace

SampleMatrix load_matrix_file(const std::filesystem::path& path, MatrixFileFormat) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path.string() + ": cannot open file");
  }

  std::vector<std::vector<double>> rows;   // feature part
  std::vector<int> raw_labels;
  size_t expected_cells = 0;
  std::string line;
  int line_no = 0;
  bool saw_data = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_row(line);

    if (!saw_data) {
      bool all_numeric = true;
      double ignored;
      for (const std::string& c : cells) {
        if (!parse_double(c, ignored)) {
          all_numeric = false;
          break;
        }
      }
      if (!all_numeric) continue;  // header row
      if (cells.size() < 2) {
        throw std::runtime_error(path.string() + ": row " + std::to_string(line_no) +
                                 " needs at least one feature column plus a label column");
      }
      expected_cells = cells.size();
      saw_data = true;
    } else if (cells.size() != expected_cells) {
      throw std::runtime_error(path.string() + ": ragged row " + std::to_string(line_no) +
                               " has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(expected_cells));
    }

    std::vector<double> features(expected_cells - 1);
    for (size_t c = 0; c + 1 < expected_cells; ++c) {
      if (!parse_double(cells[c], features[c])) {
        throw std::runtime_error(path.string() + ": non-numeric cell at row " +
                                 std::to_string(line_no) + ", column " + std::to_string(c + 1));
      }
    }
    double label_value;
    if (!parse_double(cells.back(), label_value) ||
        label_value != std::rint(label_value) || std::abs(label_value) > 1e9) {
      throw std::runtime_error(path.string() + ": non-integer label at row " +
                               std::to_string(line_no) + ", column " +
                               std::to_string(expected_cells));
    }
    rows.push_back(std::move(features));
    raw_labels.push_back(static_cast<int>(label_value));
  }

  if (rows.empty()) {
    throw std::runtime_error(path.string() + ": no data rows");
  }

  LabelRemap remap;
  SampleMatrix ds;
  ds.n = static_cast<int>(rows.size());
  ds.l = static_cast<int>(expected_cells - 1);
  ds.data.resize(ds.l, ds.n);
  ds.labels.resize(rows.size());
  for (int i = 0; i < ds.n; ++i) {
    for (int f = 0; f < ds.l; ++f) ds.data(f, i) = rows[i][f];
    ds.labels[i] = remap.map(raw_labels[i]);
  }
  ds.p = static_cast<int>(remap.original.size());
  ds.original_ids = remap.original;
  if (ds.p < 2) {
    throw std::runtime_error(path.string() + ": fewer than 2 classes (found " +
                             std::to_string(ds.p) + ")");
  }
  ds.validate();
  return ds;
}

SampleMatrix load_image_dir(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw std::runtime_error(root.string() + ": not a directory");
  }

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (class_dirs.size() < 2) {
    throw std::runtime_error(root.string() + ": fewer than 2 class subdirectories");
  }

  SampleMatrix ds;
  std::vector<std::pair<GrayImage, int>> images;  // image, class id
  int width = 0;
  int height = 0;
  for (size_t c = 0; c < class_dirs.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
      if (entry.is_regular_file() && has_supported_image_extension(entry.path())) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (files.empty()) {
      throw std::runtime_error(class_dirs[c].string() + ": empty class directory");
    }
    for (const fs::path& file : files) {
      GrayImage img = read_gray_image(file);
      if (width == 0) {
        width = img.width;
        height = img.height;
      } else if (img.width != width || img.height != height) {
        throw std::runtime_error(file.string() + ": image is " + std::to_string(img.width) +
                                 "x" + std::to_string(img.height) + ", expected " +
                                 std::to_string(width) + "x" + std::to_string(height));
      }
      images.emplace_back(std::move(img), static_cast<int>(c) + 1);
    }
    ds.class_names.push_back(class_dirs[c].filename().string());
    ds.original_ids.push_back(static_cast<int>(c) + 1);
  }

  ds.p = static_cast<int>(class_dirs.size());
  ds.n = static_cast<int>(images.size());
  ds.l = width * height;
  ds.image_width = width;
  ds.image_height = height;
  ds.data.resize(ds.l, ds.n);
  ds.labels.resize(images.size());
  for (int i = 0; i < ds.n; ++i) {
    const GrayImage& img = images[static_cast<size_t>(i)].first;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        ds.data(y * width + x, i) = static_cast<double>(img.at(y, x));
      }
    }
    ds.labels[i] = images[static_cast<size_t>(i)].second;
  }
  ds.validate();
  return ds;
}

namespace {

std::vector<std::vector<int>> indices_by_class(const SampleMatrix& ds) {
  std::vector<std::vector<int>> per_class(ds.p);
  for (int i = 0; i < ds.n; ++i) per_class[ds.labels[i] - 1].push_back(i);
  return per_class;
}

Fold make_fold(const std::vector<int>& test, int n) {
  Fold fold;
  fold.test = test;
  std::sort(fold.test.begin(), fold.test.end());
  std::vector<bool> in_test(n, false);
  for (int idx : fold.test) in_test[idx] = true;
  for (int i = 0; i < n; ++i) {
    if (!in_test[i]) fold.train.push_back(i);
  }
  return fold;
}

}  // namespace

SplitPlan kfold_split(const SampleMatrix& ds, int k) {
  ds.validate();
  if (k < 2) {
    throw std::invalid_argument("k-fold split requires k >= 2, got " + std::to_string(k));
  }
  auto per_class = indices_by_class(ds);
  for (int c = 0; c < ds.p; ++c) {
    if (static_cast<int>(per_class[c].size()) < k) {
      throw std::invalid_argument("class " + std::to_string(c + 1) + " has only " +
                                  std::to_string(per_class[c].size()) + " samples, fewer than k=" +
                                  std::to_string(k));
    }
  }

  SplitPlan plan;
  for (int fold_idx = 0; fold_idx < k; ++fold_idx) {
    std::vector<int> test;
    for (int c = 0; c < ds.p; ++c) {
      int m = static_cast<int>(per_class[c].size());
      int base = m / k;
      int rem = m % k;
      // Contiguous blocks in load order; the first `rem` blocks take one extra.
      int begin = fold_idx * base + std::min(fold_idx, rem);
      int size = base + (fold_idx < rem ? 1 : 0);
      for (int j = begin; j < begin + size; ++j) test.push_back(per_class[c][j]);
    }
    plan.folds.push_back(make_fold(test, ds.n));
  }
  return plan;
}

SplitPlan leave_one_out_split(const SampleMatrix& ds) {
  ds.validate();
  auto per_class = indices_by_class(ds);
  for (int c = 0; c < ds.p; ++c) {
    if (per_class[c].size() < 2) {
      throw std::invalid_argument("class " + std::to_string(c + 1) +
                                  " has a single sample; leave-one-out would leave it untrained");
    }
  }
  SplitPlan plan;
  for (int i = 0; i < ds.n; ++i) plan.folds.push_back(make_fold({i}, ds.n));
  return plan;
}

SplitPlan first_n_per_class_split(const SampleMatrix& ds, int n_train) {
  ds.validate();
  if (n_train < 1) {
    throw std::invalid_argument("n_train must be positive, got " + std::to_string(n_train));
  }
  auto per_class = indices_by_class(ds);
  std::vector<int> test;
  for (int c = 0; c < ds.p; ++c) {
    if (static_cast<int>(per_class[c].size()) <= n_train) {
      throw std::invalid_argument("class " + std::to_string(c + 1) + " has " +
                                  std::to_string(per_class[c].size()) +
                                  " samples, needs more than n_train=" + std::to_string(n_train));
    }
    for (size_t j = n_train; j < per_class[c].size(); ++j) test.push_back(per_class[c][j]);
  }
  SplitPlan plan;
  plan.folds.push_back(make_fold(test, ds.n));
  return plan;
}

}  // namespace cdlpp::dataset
