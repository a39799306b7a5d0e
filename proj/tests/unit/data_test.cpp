#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "tskd/data.hpp"

namespace {

using tskd::Matrix;

tskd::RawTable parse(const std::string& text, tskd::CsvOptions options = {}) {
  std::istringstream in(text);
  return tskd::parse_csv(in, options);
}

TEST(Csv, CategoricalLabelsInFirstAppearanceOrder) {
  const auto t = parse("1,2,A\n3,4,B\n5,6,A");
  Matrix expected(3, 2);
  expected << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(t.features, expected);
  EXPECT_EQ(t.labels, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(t.class_names, (std::vector<std::string>{"A", "B"}));
}

TEST(Csv, HeaderCapturedAndSkipped) {
  tskd::CsvOptions opts;
  opts.header = true;
  const auto t = parse("width,height,kind\n1,2,x\n3,4,y\n", opts);
  EXPECT_EQ(t.features.rows(), 2);
  EXPECT_EQ(t.feature_names, (std::vector<std::string>{"width", "height"}));
}

TEST(Csv, RaggedRowNamesTheRow) {
  try {
    parse("1,2,A\n3,B\n5,6,A");
    FAIL() << "expected a parse error";
  } catch (const tskd::ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Csv, MissingCellAndEmptyInput) {
  try {
    parse("1,2,A\n3,,B\n");
    FAIL() << "expected a parse error";
  } catch (const tskd::ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
  EXPECT_THROW(parse(""), tskd::ParseError);
  tskd::CsvOptions opts;
  opts.header = true;
  EXPECT_THROW(parse("a,b,c\n", opts), tskd::ParseError);
  EXPECT_THROW(tskd::load_csv("/nonexistent/file.csv"), tskd::ParseError);
}

TEST(Csv, LabelColumnDelimiterAndCategoricalFeatures) {
  tskd::CsvOptions opts;
  opts.delimiter = ';';
  opts.label_column = 0;
  const auto t = parse("2;red;1.5\n1;blue;2.5\n2;red;3.5\n", opts);
  EXPECT_EQ(t.labels, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(t.class_names, (std::vector<std::string>{"1", "2"}));
  Matrix expected(3, 2);
  expected << 0, 1.5, 1, 2.5, 0, 3.5;
  EXPECT_EQ(t.features, expected);
  opts.label_column = 5;
  EXPECT_THROW(parse("1;2\n", opts), tskd::ParseError);
}

TEST(Csv, QuotedCells) {
  const auto t = parse("\"1\",\"a,b\",yes\n2,c,no\n");
  EXPECT_EQ(t.features(0, 0), 1.0);
  EXPECT_EQ(t.features(0, 1), 0.0);
  EXPECT_EQ(t.features(1, 1), 1.0);
}

TEST(Normalize, MinMaxConstantAndClamp) {
  Matrix train(3, 2);
  train << 2, 5, 4, 5, 6, 5;
  Matrix test(2, 2);
  test << 8, 5, 0, 9;
  const auto out = tskd::normalize(train, test);
  EXPECT_EQ(out.train.col(0), Eigen::Vector3d(0, 0.5, 1));
  EXPECT_EQ(out.train.col(1), Eigen::Vector3d::Zero());
  EXPECT_EQ(out.applied(0, 0), 1.0);
  EXPECT_EQ(out.applied(1, 0), 0.0);
  EXPECT_EQ(out.applied(1, 1), 0.0);
  EXPECT_THROW(tskd::normalize(Matrix(0, 2), test), std::invalid_argument);
  EXPECT_THROW(tskd::normalize(train, Matrix::Zero(1, 3)), std::invalid_argument);
}

TEST(DatasetType, ValidationAndSubset) {
  auto ds = tskd::make_dataset(parse("1,2,A\n3,4,B\n5,6,A"));
  EXPECT_EQ(ds.class_count, 2);
  EXPECT_NO_THROW(ds.validate());
  const std::vector<tskd::Index> rows{2, 1};
  const auto sub = ds.subset(rows);
  EXPECT_EQ(sub.y, (std::vector<int>{0, 1}));
  EXPECT_EQ(sub.X(0, 0), 5.0);
  ds.y[1] = 0;
  EXPECT_THROW(ds.validate(), std::invalid_argument);
  ds.y[1] = 3;
  EXPECT_THROW(ds.validate(), std::invalid_argument);
}

TEST(DatasetType, GlobalNormalization) {
  const auto ds = tskd::globally_normalized(tskd::make_dataset(parse("1,2,A\n3,4,B\n5,8,A")));
  ASSERT_TRUE(ds.normalization.has_value());
  EXPECT_EQ(ds.X.minCoeff(), 0.0);
  EXPECT_EQ(ds.X.maxCoeff(), 1.0);
  EXPECT_EQ(ds.X(1, 1), 1.0 / 3.0);
}

TEST(Cleveland, RegroupsFiveLevelsIntoThree) {
  const std::vector<int> in{0, 1, 2, 3, 4};
  EXPECT_EQ(tskd::regroup_cleveland(in), (std::vector<int>{0, 1, 1, 1, 2}));
  EXPECT_THROW(tskd::regroup_cleveland(std::vector<int>{5}), std::invalid_argument);
}

TEST(Folds, TwoByTwo) {
  const std::vector<int> y{0, 0, 1, 1};
  const auto plan = tskd::stratified_folds(y, 2, 3);
  for (int f = 0; f < 2; ++f) {
    const auto test = plan.test_indices(f);
    ASSERT_EQ(test.size(), 2u);
    EXPECT_NE(y[static_cast<std::size_t>(test[0])], y[static_cast<std::size_t>(test[1])]);
  }
}

TEST(Folds, DeterministicPerSeed) {
  std::vector<int> y(60);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 4);
  EXPECT_EQ(tskd::stratified_folds(y, 5, 11).assignment, tskd::stratified_folds(y, 5, 11).assignment);
  EXPECT_NE(tskd::stratified_folds(y, 5, 11).assignment, tskd::stratified_folds(y, 5, 12).assignment);
  EXPECT_THROW(tskd::stratified_folds(y, 1, 11), std::invalid_argument);
}

TEST(Folds, IrisShapeHasFivePerClassPerFold) {
  std::vector<int> y(150);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i / 50);
  const auto plan = tskd::stratified_folds(y, 10, 1);
  for (int f = 0; f < 10; ++f) {
    std::array<int, 3> counts{};
    for (auto i : plan.test_indices(f)) ++counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
    EXPECT_EQ(counts, (std::array<int, 3>{5, 5, 5}));
  }
}

TEST(FoldsProperty, PartitionAndBalance) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int classes = 2 + static_cast<int>(gen() % 5);
    const int k = 2 + static_cast<int>(gen() % 9);
    std::vector<int> y(20 + gen() % 200);
    for (auto& v : y) v = static_cast<int>(gen() % static_cast<std::uint64_t>(classes));
    const auto plan = tskd::stratified_folds(y, k, gen());
    std::set<tskd::Index> seen;
    for (int f = 0; f < k; ++f) {
      const auto test = plan.test_indices(f);
      const auto train = plan.train_indices(f);
      EXPECT_EQ(test.size() + train.size(), y.size());
      for (auto i : test) EXPECT_TRUE(seen.insert(i).second);
    }
    EXPECT_EQ(seen.size(), y.size());
    for (int c = 0; c < classes; ++c) {
      int lo = 1 << 30, hi = 0;
      for (int f = 0; f < k; ++f) {
        int n = 0;
        for (auto i : plan.test_indices(f)) n += y[static_cast<std::size_t>(i)] == c;
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      EXPECT_LE(hi - lo, 1);
    }
  }
}

TEST(Cache, RoundTripWithinTolerance) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  tskd::Dataset ds;
  ds.X.resize(40, 5);
  for (Eigen::Index i = 0; i < ds.X.size(); ++i) ds.X(i) = unit(gen);
  ds.y.resize(40);
  for (std::size_t i = 0; i < 40; ++i) ds.y[i] = static_cast<int>(i % 3);
  ds.class_count = 3;
  ds.feature_names = {"a", "b", "c", "d", "e"};
  ds.class_names = {"low", "mid", "high"};
  ds.normalization = tskd::Normalizer{Eigen::VectorXd::Constant(5, -1.0), Eigen::VectorXd::Constant(5, 3.0)};
  const auto path = std::filesystem::temp_directory_path() / "tskd_cache_roundtrip.csv";
  tskd::write_dataset_cache(path, ds);
  const auto back = tskd::read_dataset_cache(path);
  EXPECT_LE((back.X - ds.X).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(back.y, ds.y);
  EXPECT_EQ(back.class_names, ds.class_names);
  EXPECT_EQ(back.feature_names, ds.feature_names);
  ASSERT_TRUE(back.normalization.has_value());
  EXPECT_EQ(back.normalization->min, ds.normalization->min);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".meta.json");
}

TEST(BundledData, ShapesAndClasses) {
  tskd::CsvOptions opts;
  opts.header = true;
  const std::string dir = TSKD_DATA_DIR;
  const auto iris = tskd::make_dataset(tskd::load_csv(dir + "/iris.csv", opts));
  EXPECT_EQ(iris.samples(), 150);
  EXPECT_EQ(iris.features(), 4);
  EXPECT_EQ(iris.class_count, 3);
  const auto wine = tskd::make_dataset(tskd::load_csv(dir + "/wine.csv", opts));
  EXPECT_EQ(wine.samples(), 178);
  EXPECT_EQ(wine.features(), 13);
  const auto seeds = tskd::make_dataset(tskd::load_csv(dir + "/seeds.csv", opts));
  EXPECT_EQ(seeds.samples(), 210);
  EXPECT_EQ(seeds.features(), 7);
  EXPECT_EQ(seeds.class_count, 3);
}

}  // namespace
