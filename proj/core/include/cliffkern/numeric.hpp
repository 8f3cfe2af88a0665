#pragma once

// Comparison metrics used by the tests, the parity report and bench verification.

#include <span>

namespace cliffkern {

/// max|a - e|.
double max_abs_error(std::span<const float> actual, std::span<const float> expected);

/// Normwise relative error max|a - e| / max(max|e|, floor). The floor keeps
/// the metric finite for all-zero references.
double max_relative_error(std::span<const float> actual, std::span<const float> expected, double floor = 1e-30);

}  // namespace cliffkern
