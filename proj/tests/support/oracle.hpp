#pragma once

// Reference implementations used only by tests. They avoid the library's code paths
// (no Eigen solvers, no log-space tricks) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Rows a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

/// q = ((1/L) I + A^T A)^{-1} A^T y through explicitly formed normal equations.
inline std::vector<double> ridge_normal_equations(const Rows& design, const std::vector<double>& y, double L) {
  const std::size_t n = design.size();
  const std::size_t d = design.front().size();
  Rows lhs(d, std::vector<double>(d, 0.0));
  std::vector<double> rhs(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += design[r][i] * design[r][j];
      lhs[i][j] = s;
    }
    lhs[i][i] += 1.0 / L;
    for (std::size_t r = 0; r < n; ++r) rhs[i] += design[r][i] * y[r];
  }
  return gauss_solve(std::move(lhs), std::move(rhs));
}

/// b_0 = [1]; b_n = [1, x_1 b_{n-1}, ..., x_m b_{n-1}].
inline std::vector<double> basis(const std::vector<double>& x, int order) {
  std::vector<double> b{1.0};
  for (int level = 1; level <= order; ++level) {
    std::vector<double> next{1.0};
    for (double xi : x) {
      for (double v : b) next.push_back(xi * v);
    }
    b = std::move(next);
  }
  return b;
}

/// Normalized Gaussian firing strengths by direct products (no log space).
inline std::vector<double> firing(const Rows& centers, const Rows& widths, const std::vector<double>& x) {
  std::vector<double> mu(centers.size());
  double total = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    double p = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double diff = x[i] - centers[k][i];
      p *= std::exp(-diff * diff / (2.0 * widths[k][i]));
    }
    mu[k] = p;
    total += p;
  }
  for (double& v : mu) v /= total;
  return mu;
}

/// Stacked design row: concatenation over rules of mu_k * basis(x).
inline std::vector<double> design_row(const Rows& centers, const Rows& widths, const std::vector<double>& x,
                                      int order) {
  const std::vector<double> mu = firing(centers, widths, x);
  const std::vector<double> b = basis(x, order);
  std::vector<double> row;
  for (double m : mu) {
    for (double v : b) row.push_back(m * v);
  }
  return row;
}

inline Rows to_rows(const Eigen::MatrixXd& m) {
  Rows out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  }
  return out;
}

inline std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[c] = m(r, c);
  return out;
}

/// Softmax of one row at temperature tau, plain exp with max shift.
inline std::vector<double> softmax(const std::vector<double>& z, double tau) {
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += p[i] = std::exp((z[i] - mx) / tau);
  for (double& v : p) v /= s;
  return p;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

/// Central finite differences of f at every entry of x.
inline Eigen::MatrixXd finite_difference(const std::function<double(const Eigen::MatrixXd&)>& f, Eigen::MatrixXd x,
                                         double h = 1e-5) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double saved = x(r, c);
      x(r, c) = saved + h;
      const double up = f(x);
      x(r, c) = saved - h;
      const double down = f(x);
      x(r, c) = saved;
      g(r, c) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

/// Largest entrywise relative gap; entries below `floor` in magnitude are compared against `floor`.
inline double max_relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-4) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), floor});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

}  // namespace oracle
