#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "tskd/distill.hpp"
#include "tskd/expansion.hpp"
#include "tskd/teacher.hpp"

namespace {

using tskd::Matrix;
using tskd::Vector;

Matrix uniform_matrix(std::mt19937_64& gen, tskd::Index rows, tskd::Index cols) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix X(rows, cols);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = unit(gen);
  return X;
}

double ridge_objective(const Matrix& A, const Vector& y, const Vector& q, double L) {
  return q.squaredNorm() / L + (A * q - y).squaredNorm();
}

TEST(Ridge, ScalarSingleSample) {
  const Vector q = tskd::solve_ridge(Matrix::Ones(1, 1), Vector::Ones(1), 100.0);
  EXPECT_NEAR(q(0), 1.0 / 1.01, 1e-14);
  EXPECT_NEAR(q(0), 0.9901, 1e-4);
}

TEST(Ridge, ScalarManySamples) {
  const int n = 7;
  const Vector q = tskd::solve_ridge(Matrix::Ones(n, 1), Vector::Ones(n), 100.0);
  EXPECT_NEAR(q(0), n / (n + 0.01), 1e-14);
}

TEST(Ridge, ZeroTargetGivesZero) {
  std::mt19937_64 gen(4);
  const Vector q = tskd::solve_ridge(uniform_matrix(gen, 10, 6), Vector::Zero(10), 100.0);
  EXPECT_EQ(q.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ridge, RejectsBadInput) {
  EXPECT_THROW(tskd::solve_ridge(Matrix(0, 3), Vector(0), 100.0), std::invalid_argument);
  EXPECT_THROW(tskd::solve_ridge(Matrix::Ones(2, 2), Vector::Ones(3), 100.0), std::invalid_argument);
  EXPECT_THROW(tskd::solve_ridge(Matrix::Ones(2, 2), Vector::Ones(2), 0.0), std::invalid_argument);
}

TEST(Ridge, MatchesNormalEquationsOracle) {
  std::mt19937_64 gen(20);
  const Matrix A = uniform_matrix(gen, 20, 5);
  const Vector y = uniform_matrix(gen, 20, 1);
  const Vector q = tskd::solve_ridge(A, y, 100.0);
  const auto ref = oracle::ridge_normal_equations(oracle::to_rows(A), oracle::row_of(y.transpose(), 0), 100.0);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(q(i), ref[static_cast<std::size_t>(i)], 1e-8);
}

TEST(Ridge, PrimalAndDualAgree) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    const tskd::Index n = 5 + static_cast<tskd::Index>(gen() % 40);
    const tskd::Index d = 5 + static_cast<tskd::Index>(gen() % 40);
    const Matrix A = uniform_matrix(gen, n, d);
    const Vector y = uniform_matrix(gen, n, 1);
    const Vector p = tskd::solve_ridge(A, y, 100.0, tskd::SolvePath::kPrimal);
    const Vector q = tskd::solve_ridge(A, y, 100.0, tskd::SolvePath::kDual);
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-7) << "n=" << n << " d=" << d;
  }
}

TEST(Teacher, FitMatchesOracleOnStackedDesign) {
  std::mt19937_64 gen(22);
  const auto rb = tskd::build_rule_base(2, 2, {0.5}, 3);
  const Matrix X = uniform_matrix(gen, 30, 2);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
  const auto enc = tskd::default_class_encoding(3);
  const Vector y = tskd::encode_labels(labels, enc);
  const auto model = tskd::fit_teacher(rb, X, y, 100.0);
  ASSERT_EQ(model.coefficients.size(), 2 * tskd::basis_length(3, 2));

  oracle::Rows design;
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    design.push_back(oracle::design_row(oracle::to_rows(rb.centers()), oracle::to_rows(rb.widths()),
                                        oracle::row_of(X, n), 3));
  }
  const auto ref = oracle::ridge_normal_equations(design, oracle::row_of(y.transpose(), 0), 100.0);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(model.coefficients(static_cast<tskd::Index>(i)), ref[i], 1e-8);
}

TEST(Teacher, EncodingAndValidation) {
  EXPECT_EQ(tskd::default_class_encoding(3), (std::vector<double>{0, 1, 2}));
  const std::vector<int> labels{2, 0, 1};
  EXPECT_EQ(tskd::encode_labels(labels, tskd::default_class_encoding(3)), Eigen::Vector3d(2, 0, 1));
  const auto rb = tskd::build_rule_base(1, 1, {0.5}, 1);
  EXPECT_THROW(tskd::fit_teacher(rb, Matrix(0, 1), Vector(0), 100.0), std::invalid_argument);
  tskd::TeacherOptions opts;
  opts.class_labels = {0, 1};
  EXPECT_THROW(tskd::fit_teacher(rb, Matrix::Zero(1, 1), Vector::Constant(1, 0.5), 100.0, opts),
               std::invalid_argument);
  opts.class_labels = {1, 0};
  EXPECT_THROW(tskd::fit_teacher(rb, Matrix::Zero(1, 1), Vector::Zero(1), 100.0, opts), std::invalid_argument);
}

TEST(Teacher, PredictZeroAndConstantCoefficients) {
  const auto rb = tskd::build_rule_base(1, 1, {0.5}, 2);
  tskd::TeacherModel model;
  model.rule_base = rb;
  model.order = 3;
  model.regularization = 100.0;
  model.class_labels = {0, 1};
  model.coefficients = Vector::Zero(tskd::basis_length(3, 1));
  const Matrix X = Eigen::Vector3d(0.1, 0.5, 0.9);
  EXPECT_EQ(tskd::predict_teacher(model, X).cwiseAbs().maxCoeff(), 0.0);
  model.coefficients(0) = 1.0;
  const Vector out = tskd::predict_teacher(model, X);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(out(i), 1.0, 1e-15);
  EXPECT_THROW(tskd::predict_teacher(model, Matrix::Zero(2, 2)), std::invalid_argument);
  EXPECT_THROW(tskd::predict_teacher(tskd::TeacherModel{}, X), tskd::InvalidState);
}

TEST(Teacher, RidgeOptimalityUnderPerturbation) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const tskd::Index n = 5 + static_cast<tskd::Index>(gen() % 46);
    const tskd::Index m = 1 + static_cast<tskd::Index>(gen() % 4);
    const tskd::Index k = 1 + static_cast<tskd::Index>(gen() % 3);
    const auto rb = tskd::build_rule_base(k, m, {0.5}, gen());
    const Matrix X = uniform_matrix(gen, n, m);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<int>(gen() % 3);
    const Vector y = tskd::encode_labels(labels, tskd::default_class_encoding(3));
    tskd::TeacherOptions opts;
    opts.class_labels = tskd::default_class_encoding(3);
    const auto model = tskd::fit_teacher(rb, X, y, 100.0, opts);
    const Matrix G = tskd::stack_design_matrix(tskd::firing_strengths(rb, X), X, 3);
    const double best = ridge_objective(G, y, model.coefficients, 100.0);
    for (int p = 0; p < 100; ++p) {
      Vector delta(model.coefficients.size());
      for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) = sign(gen);
      delta *= 1e-3 / delta.norm();
      EXPECT_LE(best, ridge_objective(G, y, model.coefficients + delta, 100.0));
    }
    // Coordinate nudges of +0.01 never lower the regularized objective. Plain training MSE can drop,
    // since the ridge solution is shrunk away from the least-squares one.
    for (Eigen::Index i = 0; i < model.coefficients.size(); ++i) {
      Vector q = model.coefficients;
      q(i) += 0.01;
      EXPECT_LE(best, ridge_objective(G, y, q, 100.0)) << "coordinate " << i;
    }
  }
}

TEST(Teacher, DeterministicFit) {
  std::mt19937_64 gen(24);
  const auto rb = tskd::build_rule_base(3, 3, {0.5}, 9);
  const Matrix X = uniform_matrix(gen, 25, 3);
  std::vector<int> labels(25);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  const Vector y = tskd::encode_labels(labels, tskd::default_class_encoding(2));
  const auto a = tskd::fit_teacher(rb, X, y, 100.0);
  const auto b = tskd::fit_teacher(rb, X, y, 100.0);
  EXPECT_EQ(a.coefficients, b.coefficients);
}

TEST(Teacher, ClassesByNearestEncoding) {
  tskd::TeacherModel model;
  model.class_labels = {0, 1, 2};
  const Vector out = Eigen::Vector4d(-0.3, 0.6, 1.49, 7.0);
  EXPECT_EQ(tskd::teacher_classes(model, out), (std::vector<int>{0, 1, 1, 2}));
  const Matrix z = tskd::teacher_logits(out, model.class_labels);
  EXPECT_EQ(tskd::teacher_classes(model, out), std::vector<int>({0, 1, 1, 2}));
  for (int n = 0; n < 4; ++n) {
    Eigen::Index arg;
    z.row(n).maxCoeff(&arg);
    EXPECT_EQ(arg, tskd::teacher_classes(model, out)[static_cast<std::size_t>(n)]);
  }
}

}  // namespace
