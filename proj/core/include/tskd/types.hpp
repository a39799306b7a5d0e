#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tskd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when gradient training produces a non-finite loss.
class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(int epoch)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Raised by the CSV and model readers; row/column are 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : std::runtime_error(Describe(what, row, column)), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string Describe(const std::string& what, std::size_t row, std::size_t column) {
    std::string out = what;
    if (row > 0) out += " (row " + std::to_string(row);
    if (row > 0 && column > 0) out += ", column " + std::to_string(column);
    if (row > 0) out += ")";
    return out;
  }

  std::size_t row_;
  std::size_t column_;
};

/// Raised when an operation needs a fitted model and gets an empty one.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tskd
