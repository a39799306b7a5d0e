#pragma once

#include <span>
#include <vector>

#include "tskd/fuzzy.hpp"
#include "tskd/types.hpp"

namespace tskd {

/// Which side of the ridge system to factor. Both give the same predictor.
enum class SolvePath {
  kAuto,    ///< dual when N < D, primal otherwise
  kPrimal,  ///< ((1/L) I_D + Xg^T Xg) q = Xg^T y
  kDual,    ///< q = Xg^T ((1/L) I_N + Xg Xg^T)^{-1} y
};

struct TeacherOptions {
  int order = 3;
  /// Encoded class values, strictly increasing. Empty means the sorted distinct targets.
  std::vector<double> class_labels;
  SolvePath solve = SolvePath::kAuto;
};

/// Scalar-output high-order TSK regressor whose consequents come from one ridge solve.
struct TeacherModel {
  RuleBase rule_base;
  int order = 3;
  Vector coefficients;
  double regularization = 0.0;
  std::vector<double> class_labels;

  bool fitted() const noexcept { return coefficients.size() > 0; }
  Index class_count() const noexcept { return static_cast<Index>(class_labels.size()); }
};

/// Class t encodes as t (so classes 0..C-1 map to 0.0..C-1).
std::vector<double> default_class_encoding(Index classes);
Vector encode_labels(std::span<const int> labels, std::span<const double> encoding);

/// Ridge coefficient is 1/L. Throws std::invalid_argument for N = 0, L <= 0, or targets outside
/// the class encoding.
TeacherModel fit_teacher(const RuleBase& rules, const Matrix& X, const Vector& targets, double L,
                         const TeacherOptions& options = {});

/// Solves the ridge system for an explicit design matrix. Exposed for the solver oracles.
Vector solve_ridge(const Matrix& design, const Vector& targets, double L, SolvePath path = SolvePath::kAuto);

Vector predict_teacher(const TeacherModel& model, const Matrix& X);

/// Index of the encoding closest to each output (argmax of the distance logits).
std::vector<int> teacher_classes(const TeacherModel& model, const Vector& outputs);

}  // namespace tskd
