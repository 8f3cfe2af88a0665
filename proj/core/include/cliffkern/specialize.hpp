#pragma once

// Signature-specialized multiply-add schedules.
//
// A schedule lists every non-vanishing blade interaction of the geometric
// product a * b as a fused multiply-add (or negated multiply-add) into one
// output blade. It is built once per layer and drives both the interpreted
// kernels and, through `static_schedule_terms`, the compile-time unrolled
// kernels generated for each of the 36 signatures with k <= 3.

#include <cstdint>
#include <string>
#include <vector>

#include "cliffkern/algebra.hpp"

namespace cliffkern {

struct FmaTerm {
  BladeIndex out_blade;
  BladeIndex a_blade;  // filter / weight operand
  BladeIndex b_blade;  // input operand
  bool negate = false;

  friend bool operator==(const FmaTerm&, const FmaTerm&) = default;
};

class OpSchedule {
 public:
  OpSchedule(Signature sig, std::vector<FmaTerm> terms);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t n_blades() const noexcept { return sig_.n_blades(); }
  const std::vector<FmaTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  /// One line per term: "out[t] += a[i]*b[j]" or "out[t] -= a[i]*b[j]".
  std::string to_text() const;

  friend bool operator==(const OpSchedule&, const OpSchedule&) = default;

 private:
  Signature sig_;
  std::vector<FmaTerm> terms_;
};

/// Terms ordered by output blade, then filter blade; zero entries dropped.
OpSchedule build_schedule(const BladeProductTable& table);
inline OpSchedule build_schedule(const Signature& sig) { return build_schedule(BladeProductTable(sig)); }

std::int64_t schedule_flop_count(const OpSchedule& s);

/// Executes the schedule term by term with double accumulation.
Multivector apply_schedule(const OpSchedule& s, const Multivector& a, const Multivector& b);

/// The term list baked into the compile-time kernels for `sig`, empty when
/// `sig.k() > 3`. Must equal build_schedule(sig).terms().
std::vector<FmaTerm> static_schedule_terms(const Signature& sig);

}  // namespace cliffkern
