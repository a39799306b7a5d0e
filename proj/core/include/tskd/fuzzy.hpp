#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tskd/types.hpp"

namespace tskd {

/// Fixed fuzzy partition of the normalized feature axis.
inline constexpr std::array<double, 5> kPartitionCenters{0.0, 0.25, 0.5, 0.75, 1.0};
inline constexpr std::array<std::string_view, 5> kPartitionLabels{"very low", "low", "medium", "high",
                                                                   "very high"};

/// Linguistic label of a partition center. Throws std::invalid_argument for off-grid values.
std::string_view linguistic_label(double center);

/// Kernel width shared by every (rule, feature) cell.
struct WidthPolicy {
  double width = 0.5;
};

/// K Gaussian rules over m features. Centers are drawn from kPartitionCenters, widths are the
/// variance-like term of exp(-(x - v)^2 / (2 * width)).
class RuleBase {
 public:
  RuleBase() = default;
  /// Validates the invariants; both matrices are K x m.
  RuleBase(Matrix centers, Matrix widths);

  Index rule_count() const noexcept { return centers_.rows(); }
  Index feature_count() const noexcept { return centers_.cols(); }
  bool empty() const noexcept { return centers_.size() == 0; }

  const Matrix& centers() const noexcept { return centers_; }
  const Matrix& widths() const noexcept { return widths_; }

  std::string_view label(Index rule, Index feature) const { return linguistic_label(centers_(rule, feature)); }

  /// Rule base with rules reordered so that new rule k is old rule order[k].
  RuleBase permuted(const std::vector<Index>& order) const;

  bool operator==(const RuleBase& other) const;

 private:
  Matrix centers_;
  Matrix widths_;
};

/// Samples each (rule, feature) center independently and uniformly from the partition.
RuleBase build_rule_base(Index rules, Index features, WidthPolicy width, std::uint64_t seed);

/// Normalized firing strengths, one row per sample and one column per rule.
class FiringMatrix {
 public:
  FiringMatrix() = default;
  explicit FiringMatrix(Matrix values) : values_(std::move(values)) {}

  const Matrix& values() const noexcept { return values_; }
  Index samples() const noexcept { return values_.rows(); }
  Index rules() const noexcept { return values_.cols(); }
  double operator()(Index sample, Index rule) const { return values_(sample, rule); }

 private:
  Matrix values_;
};

/// Log-membership of every sample under every rule (N x K), before normalization.
Matrix log_memberships(const RuleBase& rules, const Matrix& X);

/// Normalized memberships via log-sum-exp, so wide inputs never underflow to 0/0.
FiringMatrix firing_strengths(const RuleBase& rules, const Matrix& X);

}  // namespace tskd
