#include "tskd/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tskd/teacher.hpp"

namespace tskd {

namespace {

void check_weight(double w, const char* name) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument(std::string(name) + " must be non-negative");
}

std::vector<int> targets_of(const Matrix& onehot) { return argmax_rows(onehot); }

void check_pair(const SoftLabelSet& teacher, const SoftLabelSet& student) {
  if (teacher.samples() != student.samples() || teacher.classes() != student.classes()) {
    throw std::invalid_argument("teacher and student soft labels differ in shape");
  }
  if (teacher.targets != student.targets) throw std::invalid_argument("teacher and student targets differ");
  if (teacher.samples() == 0) throw std::invalid_argument("soft label set is empty");
}

}  // namespace

void DistillConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw std::invalid_argument("temperature must be positive");
  check_weight(target_weight, "zeta");
  check_weight(nontarget_weight, "lambda");
  check_weight(ce_weight, "phi");
  if (weighting == NontargetWeighting::kConstant && target_weight == 0.0 && nontarget_weight == 0.0 &&
      ce_weight == 0.0) {
    throw std::invalid_argument("at least one of zeta, lambda, phi must be positive");
  }
  train.validate();
}

void KdConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw std::invalid_argument("temperature must be positive");
  check_weight(kd_weight, "kd weight");
  check_weight(ce_weight, "phi");
  if (kd_weight == 0.0 && ce_weight == 0.0) throw std::invalid_argument("kd weight and phi are both zero");
  train.validate();
}

Matrix teacher_logits(const Vector& outputs, std::span<const double> class_labels) {
  if (class_labels.empty()) throw std::invalid_argument("class labels are empty");
  for (std::size_t t = 1; t < class_labels.size(); ++t) {
    if (!(class_labels[t] > class_labels[t - 1])) throw std::invalid_argument("class labels must be strictly increasing");
  }
  Matrix out(outputs.size(), static_cast<Index>(class_labels.size()));
  for (Index n = 0; n < outputs.size(); ++n) {
    for (std::size_t t = 0; t < class_labels.size(); ++t) {
      out(n, static_cast<Index>(t)) = -std::abs(outputs(n) - class_labels[t]);
    }
  }
  return out;
}

SoftLabelSet soft_labels(const Matrix& logits, double temperature, std::span<const int> targets) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (!logits.allFinite()) throw std::invalid_argument("logits must be finite");
  if (logits.cols() < 2) throw std::invalid_argument("soft labels need at least two classes");
  if (static_cast<Index>(targets.size()) != logits.rows()) {
    throw std::invalid_argument("target count differs from logit rows");
  }
  const Index n = logits.rows();
  const Index c = logits.cols();
  SoftLabelSet out;
  out.probs = softmax_rows(logits, temperature);
  out.targets.assign(targets.begin(), targets.end());
  out.binary.resize(n, 2);
  out.nontarget.resize(n, c - 1);
  for (Index r = 0; r < n; ++r) {
    const int t = targets[r];
    if (t < 0 || t >= c) throw std::invalid_argument("target class out of range");
    double rest = 0.0;
    double peak = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < c; ++j) {
      if (j == t) continue;
      rest += out.probs(r, j);
      peak = std::max(peak, logits(r, j) / temperature);
    }
    out.binary(r, 0) = out.probs(r, t);
    out.binary(r, 1) = rest;
    // Softmax restricted to the non-target logits, so tiny non-target mass keeps full precision.
    double norm = 0.0;
    for (Index j = 0, col = 0; j < c; ++j) {
      if (j == t) continue;
      out.nontarget(r, col) = std::exp(logits(r, j) / temperature - peak);
      norm += out.nontarget(r, col);
      ++col;
    }
    out.nontarget.row(r) /= norm;
  }
  return out;
}

double kl_divergence(const Eigen::Ref<const Eigen::RowVectorXd>& p, const Eigen::Ref<const Eigen::RowVectorXd>& q) {
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) == 0.0) continue;
    total += p(i) * std::log(std::max(p(i), kLogFloor) / std::max(q(i), kLogFloor));
  }
  return total;
}

double kd_loss(const SoftLabelSet& teacher, const SoftLabelSet& student) {
  check_pair(teacher, student);
  double total = 0.0;
  for (Index r = 0; r < teacher.samples(); ++r) total += kl_divergence(teacher.probs.row(r), student.probs.row(r));
  return total / static_cast<double>(teacher.samples());
}

DecoupledTerms dkd_terms(const SoftLabelSet& teacher, const SoftLabelSet& student) {
  check_pair(teacher, student);
  const Index n = teacher.samples();
  DecoupledTerms out{Vector(n), Vector::Zero(n)};
  const bool binary_only = teacher.classes() == 2;
  for (Index r = 0; r < n; ++r) {
    out.tckl(r) = kl_divergence(teacher.binary.row(r), student.binary.row(r));
    if (!binary_only) out.nckl(r) = kl_divergence(teacher.nontarget.row(r), student.nontarget.row(r));
  }
  return out;
}

DecoupledLoss dkd_loss(const SoftLabelSet& teacher, const SoftLabelSet& student, double target_weight,
                       double nontarget_weight) {
  const DecoupledTerms terms = dkd_terms(teacher, student);
  DecoupledLoss out;
  out.tckl = terms.tckl.mean();
  out.nckl = terms.nckl.mean();
  out.weighted = target_weight * out.tckl + nontarget_weight * out.nckl;
  return out;
}

DecoupledObjective::DecoupledObjective(SoftLabelSet teacher, Matrix onehot, const DistillConfig& config)
    : teacher_(std::move(teacher)), onehot_(std::move(onehot)), config_(config) {
  config_.validate();
  if (onehot_.rows() != teacher_.samples() || onehot_.cols() != teacher_.classes()) {
    throw std::invalid_argument("one-hot targets differ in shape from teacher soft labels");
  }
  if (config_.weighting == NontargetWeighting::kConstant) {
    nontarget_weights_ = Vector::Constant(teacher_.samples(), config_.nontarget_weight);
  } else {
    nontarget_weights_ = teacher_.binary.col(1);
  }
}

LossBreakdown DecoupledObjective::evaluate(const Matrix& logits, Matrix* gradient) const {
  const Index n = logits.rows();
  const Index c = logits.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double tau = config_.temperature;
  const SoftLabelSet student = soft_labels(logits, tau, teacher_.targets);
  const DecoupledTerms terms = dkd_terms(teacher_, student);

  LossBreakdown loss;
  loss.tckl = terms.tckl.mean();
  loss.nckl = terms.nckl.mean();
  const double weighted_nckl = nontarget_weights_.dot(terms.nckl) * inv_n;

  Matrix ce_grad;
  if (config_.ce_weight > 0.0) {
    const CrossEntropyObjective ce(onehot_, config_.ce_weight);
    const LossBreakdown ce_loss = ce.evaluate(logits, gradient != nullptr ? &ce_grad : nullptr);
    loss.ce = ce_loss.ce;
  } else {
    loss.ce = -(onehot_.array() * log_softmax_rows(logits).array()).sum() * inv_n;
    if (gradient != nullptr) ce_grad = Matrix::Zero(n, c);
  }
  loss.total = config_.target_weight * loss.tckl + weighted_nckl + config_.ce_weight * loss.ce;

  if (gradient != nullptr) {
    Matrix& g = *gradient;
    g = ce_grad;
    const double scale = inv_n / tau;
    for (Index r = 0; r < n; ++r) {
      const int t = teacher_.targets[r];
      const double a = teacher_.binary(r, 0);
      const double s_t = student.binary(r, 0);
      const double zeta = config_.target_weight;
      const double lambda = nontarget_weights_(r);
      if (zeta != 0.0) g(r, t) += scale * zeta * (s_t - a);
      for (Index j = 0, col = 0; j < c; ++j) {
        if (j == t) continue;
        const double s_hat = student.nontarget(r, col);
        if (zeta != 0.0) g(r, j) += scale * zeta * s_hat * (a - s_t);
        if (lambda != 0.0) g(r, j) += scale * lambda * (s_hat - teacher_.nontarget(r, col));
        ++col;
      }
    }
  }
  return loss;
}

VanillaKdObjective::VanillaKdObjective(SoftLabelSet teacher, Matrix onehot, const KdConfig& config)
    : teacher_(std::move(teacher)), onehot_(std::move(onehot)), config_(config) {
  config_.validate();
  if (onehot_.rows() != teacher_.samples() || onehot_.cols() != teacher_.classes()) {
    throw std::invalid_argument("one-hot targets differ in shape from teacher soft labels");
  }
}

LossBreakdown VanillaKdObjective::evaluate(const Matrix& logits, Matrix* gradient) const {
  const Index n = logits.rows();
  const double tau = config_.temperature;
  const SoftLabelSet student = soft_labels(logits, tau, teacher_.targets);
  LossBreakdown loss;
  loss.kd = kd_loss(teacher_, student);

  Matrix ce_grad;
  if (config_.ce_weight > 0.0) {
    const CrossEntropyObjective ce(onehot_, config_.ce_weight);
    loss.ce = ce.evaluate(logits, gradient != nullptr ? &ce_grad : nullptr).ce;
  } else {
    loss.ce = -(onehot_.array() * log_softmax_rows(logits).array()).sum() / static_cast<double>(n);
    if (gradient != nullptr) ce_grad = Matrix::Zero(n, logits.cols());
  }
  loss.total = config_.kd_weight * loss.kd + config_.ce_weight * loss.ce;
  if (gradient != nullptr) {
    *gradient = ce_grad;
    if (config_.kd_weight != 0.0) {
      *gradient += (config_.kd_weight / (static_cast<double>(n) * tau)) * (student.probs - teacher_.probs);
    }
  }
  return loss;
}

namespace {

std::vector<double> labels_or_default(std::span<const double> class_labels, Index classes) {
  if (!class_labels.empty()) return {class_labels.begin(), class_labels.end()};
  return default_class_encoding(classes);
}

}  // namespace

TrainResult distill_on_design(const Matrix& teacher_logit_matrix, StudentModel model, const Matrix& design,
                              const Matrix& onehot, const DistillConfig& config) {
  if (!model.fitted()) throw InvalidState("student model has no coefficients");
  if (teacher_logit_matrix.rows() != design.rows()) throw std::invalid_argument("teacher outputs differ in sample count");
  if (onehot.cols() != model.class_count()) throw std::invalid_argument("one-hot width differs from class count");
  // Teacher soft labels are computed once; the teacher stays frozen for the whole run.
  const DecoupledObjective objective(soft_labels(teacher_logit_matrix, config.temperature, targets_of(onehot)),
                                     onehot, config);
  TrainResult result;
  model.coefficients = minimize(std::move(model.coefficients), design, objective, config.train, &result.trace);
  result.model = std::move(model);
  return result;
}

TrainResult distill(const Vector& teacher_outputs, StudentModel model, const Matrix& X, const Matrix& onehot,
                    const DistillConfig& config, std::span<const double> class_labels) {
  config.validate();
  const auto labels = labels_or_default(class_labels, onehot.cols());
  const Matrix design = student_design(model, X);
  return distill_on_design(teacher_logits(teacher_outputs, labels), std::move(model), design, onehot, config);
}

TrainResult vanilla_kd_on_design(const Matrix& teacher_logit_matrix, StudentModel model, const Matrix& design,
                                 const Matrix& onehot, const KdConfig& config) {
  if (!model.fitted()) throw InvalidState("student model has no coefficients");
  if (teacher_logit_matrix.rows() != design.rows()) throw std::invalid_argument("teacher outputs differ in sample count");
  if (onehot.cols() != model.class_count()) throw std::invalid_argument("one-hot width differs from class count");
  const VanillaKdObjective objective(soft_labels(teacher_logit_matrix, config.temperature, targets_of(onehot)),
                                     onehot, config);
  TrainResult result;
  model.coefficients = minimize(std::move(model.coefficients), design, objective, config.train, &result.trace);
  result.model = std::move(model);
  return result;
}

TrainResult vanilla_kd_distill(const Vector& teacher_outputs, StudentModel model, const Matrix& X,
                               const Matrix& onehot, const KdConfig& config, std::span<const double> class_labels) {
  config.validate();
  const auto labels = labels_or_default(class_labels, onehot.cols());
  const Matrix design = student_design(model, X);
  return vanilla_kd_on_design(teacher_logits(teacher_outputs, labels), std::move(model), design, onehot, config);
}

}  // namespace tskd
