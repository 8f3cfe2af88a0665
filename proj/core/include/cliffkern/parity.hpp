#pragma once

// Cross-variant equivalence suite on randomized small instances over every
// valid signature with k <= 3:
//   schedule    apply_schedule vs geometric_product
//   conv        reference vs kernelized, reference vs packed
//   linear      blade GEMM vs reference, blade GEMM vs 1x1 packed convolution
//   activation  hoisted / gathered / packed / specialized vs reference,
//               all three modes, K in {1, N_B/2, N_B}

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cliffkern/specialize.hpp"

namespace cliffkern {

struct ParityOptions {
  std::uint64_t seed = 1;
  /// Test hook: when set, every layer under test runs the returned schedule
  /// instead of the correct one.
  std::function<OpSchedule(const OpSchedule&)> corrupt_schedule;
};

struct ParityEntry {
  std::string suite;  // "schedule", "conv1d", "linear", "activation", ...
  std::string pair;   // "reference vs packed", ...
  double max_error = 0.0;
  double tolerance = 0.0;
  bool absolute = false;  // absolute rather than normwise relative error
  std::size_t cases = 0;
  bool pass() const noexcept { return max_error <= tolerance; }
};

struct ParityReport {
  std::vector<ParityEntry> entries;

  bool all_pass() const noexcept;
  /// One line per entry followed by a PASS/FAIL summary line. Contains no
  /// timing, so identical seeds give identical text.
  std::string to_text() const;
};

ParityReport parity_report(const ParityOptions& opts = {});

/// Flips the sign of the first term; a schedule that is wrong for every signature.
OpSchedule corrupt_first_term(const OpSchedule& s);

}  // namespace cliffkern
