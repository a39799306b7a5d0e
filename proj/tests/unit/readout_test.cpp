#include <gtest/gtest.h>

#include "tskd/expansion.hpp"
#include "tskd/readout.hpp"
#include "tskd/student.hpp"
#include "tskd/teacher.hpp"

namespace {

using tskd::Matrix;
using tskd::Vector;

tskd::StudentModel labelled_student() {
  Matrix centers(2, 2);
  centers << 0.75, 0.0, 0.25, 1.0;
  auto sm = tskd::initialize_student(tskd::RuleBase(centers, Matrix::Constant(2, 2, 0.5)), 3);
  sm.coefficients = Matrix::Random(6, 3);
  return sm;
}

TEST(Readout, LinguisticLabelsPerRule) {
  const auto sm = labelled_student();
  const auto e = tskd::explain(sm, Eigen::Vector2d(0.3, 0.6));
  ASSERT_EQ(e.rules.size(), 2u);
  EXPECT_EQ(e.rules[0].antecedents, (std::vector<std::string>{"high", "very low"}));
  EXPECT_EQ(e.rules[1].antecedents, (std::vector<std::string>{"low", "very high"}));
  EXPECT_NEAR(e.rules[0].firing + e.rules[1].firing, 1.0, 1e-12);
  ASSERT_EQ(e.rules[0].consequents.size(), 3u);
  EXPECT_EQ(e.rules[0].consequents[1].size(), 3);
}

TEST(Readout, PredictedClassIsLogitArgmax) {
  const auto sm = labelled_student();
  for (double a : {0.0, 0.2, 0.5, 0.9}) {
    for (double b : {0.1, 0.7, 1.0}) {
      const Vector x = Eigen::Vector2d(a, b);
      const auto e = tskd::explain(sm, x);
      EXPECT_EQ(e.predicted, tskd::argmax_rows(tskd::student_logits(sm, x.transpose())).front());
      const Matrix z = tskd::student_logits(sm, x.transpose());
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (const auto& r : e.rules) sum += r.firing * r.outputs[static_cast<std::size_t>(c)];
        EXPECT_NEAR(sum, z(0, c), 1e-12);
        EXPECT_NEAR(e.scores[static_cast<std::size_t>(c)], z(0, c), 1e-12);
      }
    }
  }
}

TEST(Readout, TextNamesFeaturesClassesAndPrediction) {
  const auto sm = labelled_student();
  tskd::ReadoutOptions opts;
  opts.feature_names = {"petal", "sepal"};
  opts.class_names = {"setosa", "versicolor", "virginica"};
  const Vector x = Eigen::Vector2d(0.3, 0.6);
  const std::string text = tskd::rule_readout(sm, x, opts);
  EXPECT_NE(text.find("(petal) is high"), std::string::npos);
  EXPECT_NE(text.find("(sepal) is very low"), std::string::npos);
  const int predicted = tskd::explain(sm, x).predicted;
  EXPECT_NE(text.find("(" + opts.class_names[static_cast<std::size_t>(predicted)] + ")"), std::string::npos);
}

TEST(Readout, TeacherUsesNearestEncoding) {
  tskd::TeacherModel tm;
  tm.rule_base = tskd::build_rule_base(2, 1, {0.5}, 3);
  tm.order = 3;
  tm.coefficients = Vector::Zero(2 * tskd::basis_length(3, 1));
  tm.coefficients(0) = 1.9;
  tm.coefficients(4) = 1.9;
  tm.class_labels = {0, 1, 2};
  tm.regularization = 100.0;
  const auto e = tskd::explain(tm, Vector::Constant(1, 0.5));
  EXPECT_NEAR(e.teacher_output, 1.9, 1e-12);
  EXPECT_EQ(e.predicted, 2);
  EXPECT_NE(tskd::rule_readout(tm, Vector::Constant(1, 0.5)).find("Predicted class: 3"), std::string::npos);
}

TEST(Readout, UnfittedAndMismatchedInputs) {
  EXPECT_THROW(tskd::explain(tskd::StudentModel{}, Vector::Zero(2)), tskd::InvalidState);
  EXPECT_THROW(tskd::rule_readout(tskd::TeacherModel{}, Vector::Zero(2)), tskd::InvalidState);
  EXPECT_THROW(tskd::explain(labelled_student(), Vector::Zero(3)), std::invalid_argument);
}

}  // namespace
