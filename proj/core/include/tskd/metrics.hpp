#pragma once

#include <span>

#include "tskd/types.hpp"

namespace tskd {

/// Fraction of matching entries. Throws std::invalid_argument on empty or unequal inputs.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Support-weighted mean of per-class F1. A class with P + R = 0 scores 0.
double weighted_f(std::span<const int> predicted, std::span<const int> truth, Index classes);

}  // namespace tskd
