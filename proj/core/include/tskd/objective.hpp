#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tskd/types.hpp"

namespace tskd {

/// Per-epoch loss terms. Every term is a mean over samples; `total` is the weighted objective.
struct LossBreakdown {
  double tckl = 0.0;
  double nckl = 0.0;
  double kd = 0.0;
  double ce = 0.0;
  double total = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
};

using LossTrace = std::vector<EpochRecord>;

enum class InitPolicy {
  kZeros,
  kUniform,  ///< seeded uniform(-0.01, 0.01)
};

/// Full-batch gradient descent settings (learning rate, epoch cap, improvement threshold).
struct TrainConfig {
  double learning_rate = 0.01;
  int max_epochs = 30;
  double threshold = 1e-5;

  void validate() const;
};

/// A differentiable loss of the N x C logit matrix.
class LogitObjective {
 public:
  virtual ~LogitObjective() = default;
  /// Returns the loss; when `gradient` is non-null it receives dLoss/dLogits (N x C).
  virtual LossBreakdown evaluate(const Matrix& logits, Matrix* gradient) const = 0;
};

/// Row-wise softmax of logits / temperature, max-shifted.
Matrix softmax_rows(const Matrix& logits, double temperature = 1.0);

/// Row-wise log-softmax of logits / temperature.
Matrix log_softmax_rows(const Matrix& logits, double temperature = 1.0);

/// Mean cross-entropy of softmax(logits) against one-hot rows, times `weight`.
class CrossEntropyObjective final : public LogitObjective {
 public:
  explicit CrossEntropyObjective(Matrix onehot, double weight = 1.0);
  LossBreakdown evaluate(const Matrix& logits, Matrix* gradient) const override;

 private:
  Matrix onehot_;
  double weight_;
};

/// Minimizes objective(design * coefficients) over `coefficients`.
///
/// Record d=1 holds the loss of the initial coefficients. Each step applies
/// Q <- Q - lr * design^T dLoss/dZ and records the new loss; the loop stops once
/// loss(d-1) - loss(d) <= threshold or d >= max_epochs, and always takes at least one step.
/// Throws TrainingDiverged on a non-finite loss.
Matrix minimize(Matrix coefficients, const Matrix& design, const LogitObjective& objective,
                const TrainConfig& config, LossTrace* trace = nullptr);

/// Writes "epoch tckl nckl kd ce total" lines with a leading '#' header.
void write_loss_trace(std::ostream& out, const LossTrace& trace);

}  // namespace tskd
