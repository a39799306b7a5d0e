#pragma once

#include <cstdint>
#include <span>

#include "tskd/fuzzy.hpp"
#include "tskd/objective.hpp"
#include "tskd/types.hpp"

namespace tskd {

/// Low-order TSK classifier with one consequent column per class.
struct StudentModel {
  RuleBase rule_base;
  int order = 1;
  /// K*D(order, m) x C.
  Matrix coefficients;

  bool fitted() const noexcept { return coefficients.size() > 0; }
  Index class_count() const noexcept { return coefficients.cols(); }
};

/// Student with coefficients set by `init` (zeros, or seeded uniform(-0.01, 0.01)).
StudentModel initialize_student(const RuleBase& rules, Index classes, InitPolicy init = InitPolicy::kZeros,
                                std::uint64_t seed = 0, int order = 1);

/// Order-`order` stacked design rows for X under the model's rule base.
Matrix student_design(const StudentModel& model, const Matrix& X);

Matrix student_logits(const StudentModel& model, const Matrix& X);

std::vector<int> argmax_rows(const Matrix& scores);

Matrix one_hot(std::span<const int> labels, Index classes);

inline constexpr double kLogFloor = 1e-12;

/// Summed cross-entropy -sum onehot * log(max(p, 1e-12)). Rows of `probs` must sum to 1 +- 1e-6.
double cross_entropy(const Matrix& probs, const Matrix& onehot);

struct TrainResult {
  StudentModel model;
  LossTrace trace;
};

/// Full-batch gradient descent on the mean cross-entropy of softmax(logits).
TrainResult train_student(StudentModel model, const Matrix& X, const Matrix& onehot, const TrainConfig& config);

/// Same as train_student with the design matrix already built.
TrainResult train_student_on_design(StudentModel model, const Matrix& design, const Matrix& onehot,
                                    const TrainConfig& config);

}  // namespace tskd
