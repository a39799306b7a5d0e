#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tskd/types.hpp"

namespace tskd {

struct CsvOptions {
  char delimiter = ',';
  bool header = false;
  /// Zero-based label column; negative counts from the end (-1 is the last column).
  int label_column = -1;
};

/// Parsed CSV: numeric features (categorical columns coded) and class indices.
struct RawTable {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
};

/// Non-numeric feature columns are coded 0,1,2,... in first-appearance order. Labels that are
/// all integers are coded by sorted value; other labels by first appearance.
/// Throws ParseError on an empty input, ragged rows, or empty cells.
RawTable parse_csv(std::istream& in, const CsvOptions& options = {});
RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Per-feature min-max scaling; constant features map to 0.
struct Normalizer {
  Vector min;
  Vector max;

  static Normalizer fit(const Matrix& X);
  /// Scales and clamps to [0, 1].
  Matrix apply(const Matrix& X) const;
};

struct NormalizedPair {
  Matrix train;
  Matrix applied;
  Normalizer params;
};

/// Fits on `train` and transforms both matrices with the same parameters.
NormalizedPair normalize(const Matrix& train, const Matrix& apply);

struct Dataset {
  Matrix X;
  std::vector<int> y;
  Index class_count = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  /// Present when X has already been normalized (cache files, global normalization).
  std::optional<Normalizer> normalization;

  Index samples() const noexcept { return X.rows(); }
  Index features() const noexcept { return X.cols(); }

  /// Checks labels are in 0..C-1 and every class occurs; throws std::invalid_argument.
  void validate() const;
  Dataset subset(std::span<const Index> rows) const;
};

/// Builds a Dataset from a parsed table; C is the number of distinct class names.
Dataset make_dataset(RawTable table);

/// Normalizes the whole dataset in place of X and records the parameters.
Dataset globally_normalized(Dataset ds);

/// Cleveland grouping of the 0..4 risk scale: 0 -> 0, 1..3 -> 1, 4 -> 2.
std::vector<int> regroup_cleveland(std::span<const int> labels);

struct FoldPlan {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignment;

  std::vector<Index> train_indices(int fold) const;
  std::vector<Index> test_indices(int fold) const;
};

/// Stratified assignment: each class is shuffled then dealt round-robin, continuing the deal
/// across classes so fold sizes also stay within one of each other.
FoldPlan stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

/// Writes the dataset as CSV (header row, label last) plus `<path>.meta.json` holding class
/// names and normalization parameters. Values use 17 significant digits.
void write_dataset_cache(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset_cache(const std::filesystem::path& path);

}  // namespace tskd
