#include "cliffkern/algebra.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

#include "cliffkern/error.hpp"

namespace cliffkern {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSignature: return "InvalidSignature";
    case Errc::InvalidMetricValue: return "InvalidMetricValue";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::BatchNotDivisible: return "BatchNotDivisible";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ModeConfigMismatch: return "ModeConfigMismatch";
    case Errc::SpecializationPreconditionViolated: return "SpecializationPreconditionViolated";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::VerificationFailed: return "VerificationFailed";
    case Errc::AxisMismatch: return "AxisMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

std::string blade_name(BladeIndex blade) {
  if (blade.mask == 0) return "1";
  std::string name = "e";
  for (std::uint32_t bits = blade.mask; bits != 0; bits &= bits - 1) {
    name += std::to_string(std::countr_zero(bits) + 1);
  }
  return name;
}

namespace {

std::vector<std::int8_t> checked_metric(std::span<const int> g) {
  if (g.empty()) throw Error(Errc::InvalidSignature, "signature must have at least one generator");
  std::vector<std::int8_t> out;
  out.reserve(g.size());
  bool any_nonzero = false;
  for (int v : g) {
    if (v < -1 || v > 1) {
      throw Error(Errc::InvalidMetricValue, "metric value " + std::to_string(v) + " not in {-1,0,1}");
    }
    any_nonzero = any_nonzero || v != 0;
    out.push_back(static_cast<std::int8_t>(v));
  }
  if (!any_nonzero) throw Error(Errc::InvalidSignature, "at least one metric value must be non-zero");
  return out;
}

}  // namespace

Signature::Signature(std::initializer_list<int> g)
    : g_(checked_metric(std::span<const int>(g.begin(), g.size()))) {}

Signature::Signature(std::span<const int> g) : g_(checked_metric(g)) {}

bool Signature::has_zero() const noexcept {
  for (auto v : g_) {
    if (v == 0) return true;
  }
  return false;
}

std::string Signature::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < g_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(g_[i]);
  }
  return out;
}

Signature validate_signature(std::span<const double> g) {
  std::vector<int> ints;
  ints.reserve(g.size());
  for (double v : g) {
    if (!(v == -1.0 || v == 0.0 || v == 1.0)) {
      throw Error(Errc::InvalidMetricValue, "metric value not in {-1,0,1}");
    }
    ints.push_back(static_cast<int>(v));
  }
  return Signature(std::span<const int>(ints));
}

Signature parse_signature(const std::string& text) {
  std::vector<int> values;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty() && item.front() == '+') item.remove_prefix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw Error(Errc::InvalidMetricValue, "cannot parse metric value '" + std::string(item) + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return Signature(std::span<const int>(values));
}

std::vector<Signature> all_signatures(std::size_t k) {
  std::vector<Signature> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 3;
  std::vector<int> g(k);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) {
      g[i] = static_cast<int>(c % 3) - 1;
      any = any || g[i] != 0;
      c /= 3;
    }
    if (any) out.emplace_back(std::span<const int>(g));
  }
  return out;
}

BladeProduct blade_product(BladeIndex a, BladeIndex b, const Signature& sig) {
  const std::uint32_t limit = static_cast<std::uint32_t>(sig.n_blades());
  if (a.mask >= limit || b.mask >= limit) {
    throw Error(Errc::IndexOutOfRange, "blade mask exceeds signature dimension");
  }
  return {BladeIndex{a.mask ^ b.mask}, blade_product_coefficient(a.mask, b.mask, sig.g())};
}

BladeProductTable::BladeProductTable(const Signature& sig)
    : sig_(sig), n_(sig.n_blades()), entries_(n_ * n_) {
  for (std::uint32_t a = 0; a < n_; ++a) {
    for (std::uint32_t b = 0; b < n_; ++b) {
      entries_[a * n_ + b] = blade_product(BladeIndex{a}, BladeIndex{b}, sig_);
    }
  }
}

Multivector::Multivector(std::size_t n_blades) : blades_(n_blades, 0.0f) {
  if (n_blades == 0 || !std::has_single_bit(n_blades)) {
    throw Error(Errc::DimensionMismatch, "blade count must be a power of two");
  }
}

Multivector::Multivector(std::vector<float> blades) : blades_(std::move(blades)) {
  if (blades_.empty() || !std::has_single_bit(blades_.size())) {
    throw Error(Errc::DimensionMismatch, "blade count must be a power of two");
  }
}

Multivector Multivector::scalar(const Signature& sig, float value) {
  Multivector m(sig.n_blades());
  m[0] = value;
  return m;
}

Multivector Multivector::basis(const Signature& sig, BladeIndex blade, float value) {
  Multivector m(sig.n_blades());
  if (blade.mask >= m.size()) throw Error(Errc::IndexOutOfRange, "blade outside algebra");
  m[blade.mask] = value;
  return m;
}

Multivector Multivector::operator-() const {
  Multivector out = *this;
  for (auto& v : out.blades_) v = -v;
  return out;
}

void geometric_product_accumulate(std::span<const float> x, std::span<const float> y,
                                  const BladeProductTable& table, std::span<double> acc) {
  const std::size_t n = table.n_blades();
  if (x.size() != n || y.size() != n || acc.size() != n) {
    throw Error(Errc::DimensionMismatch, "operand blade count does not match product table");
  }
  for (std::size_t a = 0; a < n; ++a) {
    const double xa = x[a];
    if (xa == 0.0) continue;
    for (std::size_t b = 0; b < n; ++b) {
      const BladeProduct& p = table.at(a, b);
      if (p.coeff == 0) continue;
      acc[p.target.mask] += p.coeff * xa * static_cast<double>(y[b]);
    }
  }
}

Multivector geometric_product(const Multivector& x, const Multivector& y,
                              const BladeProductTable& table) {
  std::vector<double> acc(table.n_blades(), 0.0);
  geometric_product_accumulate(x.blades(), y.blades(), table, acc);
  Multivector out(table.n_blades());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i]);
  return out;
}

Multivector multivector_add(const Multivector& x, const Multivector& y) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "blade counts differ");
  Multivector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

}  // namespace cliffkern
