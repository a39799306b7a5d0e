#include "tskd/fuzzy.hpp"

#include <cmath>
#include <stdexcept>

#include "tskd/rng.hpp"

namespace tskd {

std::string_view linguistic_label(double center) {
  for (std::size_t i = 0; i < kPartitionCenters.size(); ++i) {
    if (center == kPartitionCenters[i]) return kPartitionLabels[i];
  }
  throw std::invalid_argument("center is not a partition point: " + std::to_string(center));
}

namespace {

bool on_partition(double value) {
  for (double c : kPartitionCenters) {
    if (value == c) return true;
  }
  return false;
}

}  // namespace

RuleBase::RuleBase(Matrix centers, Matrix widths) : centers_(std::move(centers)), widths_(std::move(widths)) {
  if (centers_.rows() < 1 || centers_.cols() < 1) {
    throw std::invalid_argument("rule base needs at least one rule and one feature");
  }
  if (widths_.rows() != centers_.rows() || widths_.cols() != centers_.cols()) {
    throw std::invalid_argument("rule base centers and widths differ in shape");
  }
  for (Index k = 0; k < centers_.rows(); ++k) {
    for (Index i = 0; i < centers_.cols(); ++i) {
      if (!on_partition(centers_(k, i))) {
        throw std::invalid_argument("rule center outside the fixed partition");
      }
      if (!(widths_(k, i) > 0.0) || !std::isfinite(widths_(k, i))) {
        throw std::invalid_argument("rule width must be positive and finite");
      }
    }
  }
}

RuleBase RuleBase::permuted(const std::vector<Index>& order) const {
  if (static_cast<Index>(order.size()) != rule_count()) {
    throw std::invalid_argument("permutation length differs from rule count");
  }
  Matrix c(centers_.rows(), centers_.cols());
  Matrix w(widths_.rows(), widths_.cols());
  for (Index k = 0; k < rule_count(); ++k) {
    c.row(k) = centers_.row(order[k]);
    w.row(k) = widths_.row(order[k]);
  }
  return RuleBase(std::move(c), std::move(w));
}

bool RuleBase::operator==(const RuleBase& other) const {
  return centers_.rows() == other.centers_.rows() && centers_.cols() == other.centers_.cols() &&
         centers_ == other.centers_ && widths_ == other.widths_;
}

RuleBase build_rule_base(Index rules, Index features, WidthPolicy width, std::uint64_t seed) {
  if (rules < 1) throw std::invalid_argument("rule count must be positive");
  if (features < 1) throw std::invalid_argument("feature count must be positive");
  if (!(width.width > 0.0) || !std::isfinite(width.width)) {
    throw std::invalid_argument("rule width must be positive and finite");
  }
  Engine engine(seed);
  Matrix centers(rules, features);
  for (Index k = 0; k < rules; ++k) {
    for (Index i = 0; i < features; ++i) {
      centers(k, i) = kPartitionCenters[uniform_index(engine, kPartitionCenters.size())];
    }
  }
  return RuleBase(std::move(centers), Matrix::Constant(rules, features, width.width));
}

Matrix log_memberships(const RuleBase& rules, const Matrix& X) {
  if (rules.empty()) throw InvalidState("rule base is empty");
  if (X.cols() != rules.feature_count()) {
    throw std::invalid_argument("feature count of X does not match the rule base");
  }
  if (!X.allFinite()) throw std::invalid_argument("X contains non-finite values");
  const Index n = X.rows();
  const Index k_count = rules.rule_count();
  Matrix out(n, k_count);
  for (Index k = 0; k < k_count; ++k) {
    const auto centers = rules.centers().row(k);
    const auto widths = rules.widths().row(k);
    for (Index r = 0; r < n; ++r) {
      double acc = 0.0;
      for (Index i = 0; i < X.cols(); ++i) {
        const double d = X(r, i) - centers(i);
        acc -= d * d / (2.0 * widths(i));
      }
      out(r, k) = acc;
    }
  }
  return out;
}

FiringMatrix firing_strengths(const RuleBase& rules, const Matrix& X) {
  Matrix values = log_memberships(rules, X);
  for (Index r = 0; r < values.rows(); ++r) {
    const double peak = values.row(r).maxCoeff();
    values.row(r) = (values.row(r).array() - peak).exp().matrix();
    values.row(r) /= values.row(r).sum();
  }
  return FiringMatrix(std::move(values));
}

}  // namespace tskd
