#pragma once

#include <string>
#include <vector>

#include "tskd/fuzzy.hpp"
#include "tskd/types.hpp"

namespace tskd {

inline constexpr int kMaxOrder = 3;

/// Length of the order-n consequent basis over m features: D(0)=1, D(n)=1+m*D(n-1).
Index basis_length(int order, Index features);

/// Polynomial basis of one sample. Order 1 is (1, x); each higher order is (1, x_1*b, ..., x_m*b)
/// where b is the previous order's basis, so mixed monomials appear once per ordering.
Vector expand_basis(const Eigen::Ref<const Vector>& x, int order);

/// N x (K*D) design matrix; row n is the concatenation over rules k of firing(n,k) * basis(x_n).
Matrix stack_design_matrix(const FiringMatrix& firing, const Matrix& X, int order);

/// Index map of the stacked design: rule-major, then basis position.
class DesignLayout {
 public:
  DesignLayout(Index rules, Index features, int order);

  Index rules() const noexcept { return rules_; }
  Index features() const noexcept { return features_; }
  int order() const noexcept { return order_; }
  Index basis_size() const noexcept { return basis_size_; }
  Index size() const noexcept { return rules_ * basis_size_; }

  Index offset(Index rule, Index position) const;
  Index rule_of(Index offset) const;
  Index position_of(Index offset) const;

  /// Zero-based feature indices whose product forms the monomial at `position`; empty for the constant.
  const std::vector<Index>& monomial(Index position) const { return monomials_.at(position); }

  /// Human-readable monomial, e.g. "1", "x2", "x1*x3" (1-based feature names).
  std::string monomial_name(Index position) const;

 private:
  Index rules_;
  Index features_;
  int order_;
  Index basis_size_;
  std::vector<std::vector<Index>> monomials_;
};

}  // namespace tskd
