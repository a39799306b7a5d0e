#pragma once

#include <span>
#include <vector>

#include "tskd/objective.hpp"
#include "tskd/student.hpp"
#include "tskd/types.hpp"

namespace tskd {

/// How the non-target KL term is weighted per sample.
enum class NontargetWeighting {
  kConstant,              ///< lambda for every sample (decoupled KD)
  kTeacherNontargetMass,  ///< 1 - u_t of the teacher, which recovers plain KD when zeta = 1
};

struct DistillConfig {
  double temperature = 2.0;
  double target_weight = 1.0;     // zeta
  double nontarget_weight = 2.0;  // lambda
  double ce_weight = 1.0;         // phi
  NontargetWeighting weighting = NontargetWeighting::kConstant;
  TrainConfig train;

  void validate() const;
};

/// Classic KD: weight * KL(u_teacher || u_student) + phi * H.
struct KdConfig {
  double temperature = 2.0;
  double kd_weight = 1.0;
  double ce_weight = 1.0;
  TrainConfig train;

  void validate() const;
};

/// Temperature soft labels split into target / non-target parts.
struct SoftLabelSet {
  Matrix probs;              ///< N x C
  std::vector<int> targets;  ///< ground-truth class per sample
  Matrix binary;             ///< N x 2: [u_t, sum of non-target u]
  Matrix nontarget;          ///< N x (C-1): softmax over the non-target logits, class order kept

  Index samples() const noexcept { return probs.rows(); }
  Index classes() const noexcept { return probs.cols(); }
};

/// -|y - label_t| for every output and class encoding.
Matrix teacher_logits(const Vector& outputs, std::span<const double> class_labels);

SoftLabelSet soft_labels(const Matrix& logits, double temperature, std::span<const int> targets);

/// sum_i p_i log(max(p_i, eps) / max(q_i, eps)) with eps = 1e-12; zero-mass terms contribute 0.
double kl_divergence(const Eigen::Ref<const Eigen::RowVectorXd>& p, const Eigen::Ref<const Eigen::RowVectorXd>& q);

/// Mean KL(teacher || student) over samples.
double kd_loss(const SoftLabelSet& teacher, const SoftLabelSet& student);

struct DecoupledLoss {
  double tckl = 0.0;
  double nckl = 0.0;
  double weighted = 0.0;  ///< zeta * tckl + lambda * nckl
};

/// Mean target-class and non-target-class KL terms. nckl is exactly 0 for C = 2.
DecoupledLoss dkd_loss(const SoftLabelSet& teacher, const SoftLabelSet& student, double target_weight,
                       double nontarget_weight);

/// Per-sample KL(r_M || r_S) and KL(u_hat_M || u_hat_S).
struct DecoupledTerms {
  Vector tckl;
  Vector nckl;
};
DecoupledTerms dkd_terms(const SoftLabelSet& teacher, const SoftLabelSet& student);

/// zeta * TCKL + lambda * NCKL + phi * H on student logits, against frozen teacher soft labels.
class DecoupledObjective final : public LogitObjective {
 public:
  DecoupledObjective(SoftLabelSet teacher, Matrix onehot, const DistillConfig& config);
  LossBreakdown evaluate(const Matrix& logits, Matrix* gradient) const override;

  const SoftLabelSet& teacher() const noexcept { return teacher_; }

 private:
  SoftLabelSet teacher_;
  Matrix onehot_;
  DistillConfig config_;
  Vector nontarget_weights_;
};

class VanillaKdObjective final : public LogitObjective {
 public:
  VanillaKdObjective(SoftLabelSet teacher, Matrix onehot, const KdConfig& config);
  LossBreakdown evaluate(const Matrix& logits, Matrix* gradient) const override;

 private:
  SoftLabelSet teacher_;
  Matrix onehot_;
  KdConfig config_;
};

/// Distills teacher outputs into the student. Class encodings default to 0..C-1.
TrainResult distill(const Vector& teacher_outputs, StudentModel model, const Matrix& X, const Matrix& onehot,
                    const DistillConfig& config, std::span<const double> class_labels = {});

/// Same as distill, given teacher logits and the student's design matrix.
TrainResult distill_on_design(const Matrix& teacher_logit_matrix, StudentModel model, const Matrix& design,
                              const Matrix& onehot, const DistillConfig& config);

TrainResult vanilla_kd_distill(const Vector& teacher_outputs, StudentModel model, const Matrix& X,
                               const Matrix& onehot, const KdConfig& config,
                               std::span<const double> class_labels = {});

TrainResult vanilla_kd_on_design(const Matrix& teacher_logit_matrix, StudentModel model, const Matrix& design,
                                 const Matrix& onehot, const KdConfig& config);

}  // namespace tskd
