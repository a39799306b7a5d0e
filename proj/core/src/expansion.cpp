#include "tskd/expansion.hpp"

#include <stdexcept>

namespace tskd {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxOrder) throw std::invalid_argument("order must be in 0..3");
}

// Writes basis(x, order) into out[0, D) and returns D.
Index fill_basis(const Eigen::Ref<const Vector>& x, int order, double* out) {
  out[0] = 1.0;
  if (order == 0) return 1;
  const Index inner = basis_length(order - 1, x.size());
  Index pos = 1;
  for (Index i = 0; i < x.size(); ++i) {
    // Recurse into the slot, then scale it in place.
    fill_basis(x, order - 1, out + pos);
    for (Index j = 0; j < inner; ++j) out[pos + j] *= x(i);
    pos += inner;
  }
  return pos;
}

std::vector<std::vector<Index>> monomials_of(Index features, int order) {
  std::vector<std::vector<Index>> out{{}};
  if (order == 0) return out;
  const auto inner = monomials_of(features, order - 1);
  for (Index i = 0; i < features; ++i) {
    for (const auto& mono : inner) {
      std::vector<Index> full{i};
      full.insert(full.end(), mono.begin(), mono.end());
      out.push_back(std::move(full));
    }
  }
  return out;
}

}  // namespace

Index basis_length(int order, Index features) {
  check_order(order);
  if (features < 1) throw std::invalid_argument("feature count must be positive");
  Index d = 1;
  for (int n = 1; n <= order; ++n) d = 1 + features * d;
  return d;
}

Vector expand_basis(const Eigen::Ref<const Vector>& x, int order) {
  Vector out(basis_length(order, x.size()));
  fill_basis(x, order, out.data());
  return out;
}

Matrix stack_design_matrix(const FiringMatrix& firing, const Matrix& X, int order) {
  check_order(order);
  if (firing.samples() != X.rows()) {
    throw std::invalid_argument("firing matrix and X differ in sample count");
  }
  const Index d = basis_length(order, X.cols());
  const Index k_count = firing.rules();
  Matrix out(X.rows(), k_count * d);
  Vector basis(d);
  for (Index r = 0; r < X.rows(); ++r) {
    fill_basis(X.row(r).transpose(), order, basis.data());
    for (Index k = 0; k < k_count; ++k) {
      out.block(r, k * d, 1, d) = firing(r, k) * basis.transpose();
    }
  }
  return out;
}

DesignLayout::DesignLayout(Index rules, Index features, int order)
    : rules_(rules), features_(features), order_(order), basis_size_(basis_length(order, features)) {
  if (rules < 1) throw std::invalid_argument("rule count must be positive");
  monomials_ = monomials_of(features, order);
}

Index DesignLayout::offset(Index rule, Index position) const {
  if (rule < 0 || rule >= rules_ || position < 0 || position >= basis_size_) {
    throw std::out_of_range("design layout index out of range");
  }
  return rule * basis_size_ + position;
}

Index DesignLayout::rule_of(Index offset) const {
  if (offset < 0 || offset >= size()) throw std::out_of_range("design offset out of range");
  return offset / basis_size_;
}

Index DesignLayout::position_of(Index offset) const {
  if (offset < 0 || offset >= size()) throw std::out_of_range("design offset out of range");
  return offset % basis_size_;
}

std::string DesignLayout::monomial_name(Index position) const {
  const auto& mono = monomial(position);
  if (mono.empty()) return "1";
  std::string name;
  for (std::size_t j = 0; j < mono.size(); ++j) {
    if (j > 0) name += "*";
    name += "x" + std::to_string(mono[j] + 1);
  }
  return name;
}

}  // namespace tskd
