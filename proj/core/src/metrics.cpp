#include "tskd/metrics.hpp"

#include <stdexcept>
#include <vector>

namespace tskd {

namespace {

void check_lengths(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth lengths differ");
  if (truth.empty()) throw std::invalid_argument("metrics need at least one sample");
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  check_lengths(predicted, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double weighted_f(std::span<const int> predicted, std::span<const int> truth, Index classes) {
  check_lengths(predicted, truth);
  if (classes < 1) throw std::invalid_argument("class count must be positive");
  const auto c_count = static_cast<std::size_t>(classes);
  std::vector<double> tp(c_count, 0.0), pred_count(c_count, 0.0), support(c_count, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
      throw std::invalid_argument("class index out of range");
    }
    support[truth[i]] += 1.0;
    pred_count[predicted[i]] += 1.0;
    if (predicted[i] == truth[i]) tp[truth[i]] += 1.0;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < c_count; ++c) {
    if (support[c] == 0.0) continue;
    const double precision = pred_count[c] > 0.0 ? tp[c] / pred_count[c] : 0.0;
    const double recall = tp[c] / support[c];
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    total += support[c] * f1;
  }
  return total / static_cast<double>(truth.size());
}

}  // namespace tskd
