#include "cliffkern/specialize.hpp"

#include <sstream>

#include "cliffkern/error.hpp"
#include "detail/static_schedule.hpp"

namespace cliffkern {

OpSchedule::OpSchedule(Signature sig, std::vector<FmaTerm> terms)
    : sig_(std::move(sig)), terms_(std::move(terms)) {
  const std::uint32_t n = static_cast<std::uint32_t>(sig_.n_blades());
  for (const FmaTerm& t : terms_) {
    if (t.out_blade.mask >= n || t.a_blade.mask >= n || t.b_blade.mask >= n) {
      throw Error(Errc::IndexOutOfRange, "schedule term references a blade outside the algebra");
    }
  }
}

std::string OpSchedule::to_text() const {
  std::ostringstream os;
  for (const FmaTerm& t : terms_) {
    os << "out[" << t.out_blade.mask << "] " << (t.negate ? "-=" : "+=") << " a[" << t.a_blade.mask
       << "]*b[" << t.b_blade.mask << "]\n";
  }
  return os.str();
}

OpSchedule build_schedule(const BladeProductTable& table) {
  const std::uint32_t n = static_cast<std::uint32_t>(table.n_blades());
  std::vector<FmaTerm> terms;
  terms.reserve(n * n);
  for (std::uint32_t t = 0; t < n; ++t) {
    for (std::uint32_t a = 0; a < n; ++a) {
      const std::uint32_t b = t ^ a;
      const BladeProduct& p = table.at(a, b);
      if (p.coeff == 0) continue;
      terms.push_back({BladeIndex{t}, BladeIndex{a}, BladeIndex{b}, p.coeff < 0});
    }
  }
  return OpSchedule(table.signature(), std::move(terms));
}

std::int64_t schedule_flop_count(const OpSchedule& s) {
  return 2 * static_cast<std::int64_t>(s.size());
}

Multivector apply_schedule(const OpSchedule& s, const Multivector& a, const Multivector& b) {
  const std::size_t n = s.n_blades();
  if (a.size() != n || b.size() != n) {
    throw Error(Errc::DimensionMismatch, "operand blade count does not match schedule");
  }
  std::vector<double> acc(n, 0.0);
  for (const FmaTerm& t : s.terms()) {
    const double prod = static_cast<double>(a[t.a_blade.mask]) * b[t.b_blade.mask];
    acc[t.out_blade.mask] += t.negate ? -prod : prod;
  }
  Multivector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(acc[i]);
  return out;
}

namespace {

struct TermListMaker {
  template <detail::SigKey S>
  static constexpr auto get() {
    return +[]() {
      std::vector<FmaTerm> out;
      for (const auto& t : detail::StaticSchedule<S>::terms) {
        out.push_back({BladeIndex{t.out}, BladeIndex{t.a}, BladeIndex{t.b}, t.negate});
      }
      return out;
    };
  }
};

}  // namespace

std::vector<FmaTerm> static_schedule_terms(const Signature& sig) {
  static constexpr auto table = detail::make_dispatch_table<TermListMaker>();
  const int slot = detail::static_signature_slot(sig);
  if (slot < 0) return {};
  return table[static_cast<std::size_t>(slot)]();
}

}  // namespace cliffkern
