#pragma once

#include <filesystem>

#include "cdlpp/types.hpp"

namespace cdlpp::dataset {

enum class MatrixFileFormat { CsvLabelColumn };

// CSV with one sample per row, last column an integer class label. An
// optional header row is auto-detected (non-numeric first row). Labels are
// remapped to contiguous 1..p in first-appearance order.
SampleMatrix load_matrix_file(const std::filesystem::path& path,
                              MatrixFileFormat format = MatrixFileFormat::CsvLabelColumn);

// root/<class>/<image>. Class ids follow lexicographic subdirectory order,
// samples within a class lexicographic filename order. Every image must have
// identical dimensions; each is flattened row-major into one column.
SampleMatrix load_image_dir(const std::filesystem::path& root);

// Per class, samples (in load order) are cut into k contiguous blocks of
// as-equal-as-possible size, earlier blocks taking the remainder. Fold i
// tests the union of block i across classes and trains on the rest.
SplitPlan kfold_split(const SampleMatrix& ds, int k);

// n folds; fold i tests exactly sample i.
SplitPlan leave_one_out_split(const SampleMatrix& ds);

// Single fold; per class the first n_train samples train, the rest test.
SplitPlan first_n_per_class_split(const SampleMatrix& ds, int n_train);

}  // namespace cdlpp::dataset
