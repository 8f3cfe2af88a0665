#include "cliffkern/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cliffkern/error.hpp"

namespace cliffkern {

double max_abs_error(std::span<const float> actual, std::span<const float> expected) {
  if (actual.size() != expected.size()) throw Error(Errc::ShapeMismatch, "compared buffers differ in size");
  double err = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = std::abs(static_cast<double>(actual[i]) - static_cast<double>(expected[i]));
    if (std::isnan(d)) return std::numeric_limits<double>::infinity();
    err = std::max(err, d);
  }
  return err;
}

double max_relative_error(std::span<const float> actual, std::span<const float> expected, double floor) {
  const double err = max_abs_error(actual, expected);
  double scale = floor;
  for (float e : expected) scale = std::max(scale, std::abs(static_cast<double>(e)));
  return err / scale;
}

}  // namespace cliffkern
