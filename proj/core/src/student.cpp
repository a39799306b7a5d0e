#include "tskd/student.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tskd/expansion.hpp"
#include "tskd/rng.hpp"

namespace tskd {

StudentModel initialize_student(const RuleBase& rules, Index classes, InitPolicy init, std::uint64_t seed,
                                int order) {
  if (rules.empty()) throw std::invalid_argument("student needs a rule base");
  if (classes < 2) throw std::invalid_argument("student needs at least two classes");
  const Index rows = rules.rule_count() * basis_length(order, rules.feature_count());
  StudentModel model;
  model.rule_base = rules;
  model.order = order;
  model.coefficients = Matrix::Zero(rows, classes);
  if (init == InitPolicy::kUniform) {
    Engine engine(seed);
    for (Index c = 0; c < classes; ++c) {
      for (Index r = 0; r < rows; ++r) model.coefficients(r, c) = uniform_real(engine, -0.01, 0.01);
    }
  }
  return model;
}

Matrix student_design(const StudentModel& model, const Matrix& X) {
  return stack_design_matrix(firing_strengths(model.rule_base, X), X, model.order);
}

Matrix student_logits(const StudentModel& model, const Matrix& X) {
  if (!model.fitted()) throw InvalidState("student model has no coefficients");
  const Matrix design = student_design(model, X);
  if (design.cols() != model.coefficients.rows()) {
    throw std::invalid_argument("student coefficients do not match the design width");
  }
  return design * model.coefficients;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Index r = 0; r < scores.rows(); ++r) {
    Index best = 0;
    scores.row(r).maxCoeff(&best);
    out[r] = static_cast<int>(best);
  }
  return out;
}

Matrix one_hot(std::span<const int> labels, Index classes) {
  Matrix out = Matrix::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] < 0 || labels[n] >= classes) throw std::invalid_argument("label outside 0..C-1");
    out(static_cast<Index>(n), labels[n]) = 1.0;
  }
  return out;
}

double cross_entropy(const Matrix& probs, const Matrix& onehot) {
  if (probs.rows() != onehot.rows() || probs.cols() != onehot.cols()) {
    throw std::invalid_argument("probabilities and one-hot targets differ in shape");
  }
  double total = 0.0;
  for (Index r = 0; r < probs.rows(); ++r) {
    if (std::abs(probs.row(r).sum() - 1.0) > 1e-6) {
      throw std::invalid_argument("probability row " + std::to_string(r) + " does not sum to 1");
    }
    int hot = 0;
    for (Index c = 0; c < onehot.cols(); ++c) {
      if (onehot(r, c) == 1.0) {
        ++hot;
      } else if (onehot(r, c) != 0.0) {
        hot = -1;
        break;
      }
    }
    if (hot != 1) throw std::invalid_argument("row " + std::to_string(r) + " is not one-hot");
    for (Index c = 0; c < probs.cols(); ++c) {
      if (onehot(r, c) != 0.0) total -= std::log(std::max(probs(r, c), kLogFloor));
    }
  }
  return total;
}

TrainResult train_student_on_design(StudentModel model, const Matrix& design, const Matrix& onehot,
                                    const TrainConfig& config) {
  if (!model.fitted()) throw InvalidState("student model has no coefficients");
  if (onehot.cols() != model.class_count()) throw std::invalid_argument("one-hot width differs from class count");
  if (onehot.rows() != design.rows()) throw std::invalid_argument("one-hot rows differ from sample count");
  TrainResult result;
  const CrossEntropyObjective objective(onehot);
  model.coefficients = minimize(std::move(model.coefficients), design, objective, config, &result.trace);
  result.model = std::move(model);
  return result;
}

TrainResult train_student(StudentModel model, const Matrix& X, const Matrix& onehot, const TrainConfig& config) {
  const Matrix design = student_design(model, X);
  return train_student_on_design(std::move(model), design, onehot, config);
}

}  // namespace tskd
