#include "tskd/objective.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace tskd {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (max_epochs < 1) throw std::invalid_argument("max epochs must be at least 1");
  if (!(threshold >= 0.0)) throw std::invalid_argument("stopping threshold must be non-negative");
}

Matrix log_softmax_rows(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  Matrix out = logits / temperature;
  for (Index r = 0; r < out.rows(); ++r) {
    const double peak = out.row(r).maxCoeff();
    out.row(r).array() -= peak;
    out.row(r).array() -= std::log(out.row(r).array().exp().sum());
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  Matrix out = logits / temperature;
  for (Index r = 0; r < out.rows(); ++r) {
    const double peak = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - peak).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

CrossEntropyObjective::CrossEntropyObjective(Matrix onehot, double weight)
    : onehot_(std::move(onehot)), weight_(weight) {
  if (onehot_.rows() == 0) throw std::invalid_argument("cross-entropy needs at least one sample");
}

LossBreakdown CrossEntropyObjective::evaluate(const Matrix& logits, Matrix* gradient) const {
  if (logits.rows() != onehot_.rows() || logits.cols() != onehot_.cols()) {
    throw std::invalid_argument("logits and one-hot targets differ in shape");
  }
  const double n = static_cast<double>(logits.rows());
  const Matrix log_p = log_softmax_rows(logits);
  LossBreakdown loss;
  loss.ce = -(onehot_.array() * log_p.array()).sum() / n;
  loss.total = weight_ * loss.ce;
  if (gradient != nullptr) *gradient = (weight_ / n) * (log_p.array().exp().matrix() - onehot_);
  return loss;
}

Matrix minimize(Matrix coefficients, const Matrix& design, const LogitObjective& objective,
                const TrainConfig& config, LossTrace* trace) {
  config.validate();
  if (design.cols() != coefficients.rows()) {
    throw std::invalid_argument("design width does not match coefficient rows");
  }
  Matrix gradient;
  int epoch = 1;
  LossBreakdown current = objective.evaluate(design * coefficients, &gradient);
  if (!std::isfinite(current.total)) throw TrainingDiverged(epoch);
  if (trace != nullptr) trace->push_back({epoch, current});

  while (true) {
    coefficients.noalias() -= config.learning_rate * (design.transpose() * gradient);
    ++epoch;
    const double previous = current.total;
    current = objective.evaluate(design * coefficients, &gradient);
    if (!std::isfinite(current.total) || !coefficients.allFinite()) throw TrainingDiverged(epoch);
    if (trace != nullptr) trace->push_back({epoch, current});
    if (previous - current.total <= config.threshold || epoch >= config.max_epochs) break;
  }
  return coefficients;
}

void write_loss_trace(std::ostream& out, const LossTrace& trace) {
  out << "# epoch tckl nckl kd ce total\n";
  for (const auto& rec : trace) {
    out << fmt::format("{} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", rec.epoch, rec.loss.tckl, rec.loss.nckl,
                       rec.loss.kd, rec.loss.ce, rec.loss.total);
  }
}

}  // namespace tskd
