#include "tskd/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tskd/expansion.hpp"

namespace tskd {

std::vector<double> default_class_encoding(Index classes) {
  if (classes < 1) throw std::invalid_argument("class count must be positive");
  std::vector<double> out(static_cast<std::size_t>(classes));
  for (Index t = 0; t < classes; ++t) out[t] = static_cast<double>(t);
  return out;
}

Vector encode_labels(std::span<const int> labels, std::span<const double> encoding) {
  Vector out(static_cast<Index>(labels.size()));
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= encoding.size()) {
      throw std::invalid_argument("label outside the class encoding");
    }
    out(static_cast<Index>(n)) = encoding[labels[n]];
  }
  return out;
}

namespace {

Vector solve_spd(Matrix system, const Vector& rhs) {
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(rhs);
    if (x.allFinite()) return x;
  }
  return system.colPivHouseholderQr().solve(rhs);
}

}  // namespace

Vector solve_ridge(const Matrix& design, const Vector& targets, double L, SolvePath path) {
  if (design.rows() == 0) throw std::invalid_argument("ridge solve needs at least one sample");
  if (design.rows() != targets.size()) throw std::invalid_argument("design rows and targets differ");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("regularization L must be positive");
  const double ridge = 1.0 / L;
  if (path == SolvePath::kAuto) path = design.rows() < design.cols() ? SolvePath::kDual : SolvePath::kPrimal;

  if (path == SolvePath::kPrimal) {
    Matrix gram = Matrix::Zero(design.cols(), design.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += ridge;
    return solve_spd(std::move(gram), design.transpose() * targets);
  }
  Matrix kernel = Matrix::Zero(design.rows(), design.rows());
  kernel.selfadjointView<Eigen::Lower>().rankUpdate(design);
  kernel = kernel.selfadjointView<Eigen::Lower>();
  kernel.diagonal().array() += ridge;
  return design.transpose() * solve_spd(std::move(kernel), targets);
}

TeacherModel fit_teacher(const RuleBase& rules, const Matrix& X, const Vector& targets, double L,
                         const TeacherOptions& options) {
  if (X.rows() == 0) throw std::invalid_argument("teacher needs at least one sample");
  if (X.rows() != targets.size()) throw std::invalid_argument("X rows and targets differ");
  if (!targets.allFinite()) throw std::invalid_argument("targets must be finite");

  std::vector<double> labels = options.class_labels;
  if (labels.empty()) {
    labels.assign(targets.data(), targets.data() + targets.size());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  } else {
    if (!std::is_sorted(labels.begin(), labels.end()) ||
        std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
      throw std::invalid_argument("class labels must be strictly increasing");
    }
    for (Index n = 0; n < targets.size(); ++n) {
      if (!std::binary_search(labels.begin(), labels.end(), targets(n))) {
        throw std::invalid_argument("target is not one of the class labels");
      }
    }
  }

  const Matrix design = stack_design_matrix(firing_strengths(rules, X), X, options.order);
  TeacherModel model;
  model.rule_base = rules;
  model.order = options.order;
  model.regularization = L;
  model.class_labels = std::move(labels);
  model.coefficients = solve_ridge(design, targets, L, options.solve);
  return model;
}

Vector predict_teacher(const TeacherModel& model, const Matrix& X) {
  if (!model.fitted()) throw InvalidState("teacher model is not fitted");
  const Matrix design = stack_design_matrix(firing_strengths(model.rule_base, X), X, model.order);
  if (design.cols() != model.coefficients.size()) {
    throw std::invalid_argument("teacher coefficients do not match the design width");
  }
  return design * model.coefficients;
}

std::vector<int> teacher_classes(const TeacherModel& model, const Vector& outputs) {
  if (model.class_labels.empty()) throw InvalidState("teacher has no class labels");
  std::vector<int> out(static_cast<std::size_t>(outputs.size()));
  for (Index n = 0; n < outputs.size(); ++n) {
    int best = 0;
    double best_dist = std::abs(outputs(n) - model.class_labels[0]);
    for (std::size_t t = 1; t < model.class_labels.size(); ++t) {
      const double d = std::abs(outputs(n) - model.class_labels[t]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(t);
      }
    }
    out[n] = best;
  }
  return out;
}

}  // namespace tskd
