#include "agobf/cost.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace agobf {

Cost Cost::from_double(double value) {
  return Cost(static_cast<std::int64_t>(std::llround(value * static_cast<double>(kScale))));
}

std::string Cost::to_string() const {
  if (is_infinite()) return "inf";
  const bool negative = micros_ < 0;
  const std::uint64_t magnitude = negative ? static_cast<std::uint64_t>(-micros_) : static_cast<std::uint64_t>(micros_);
  std::string out = negative ? "-" : "";
  out += std::to_string(magnitude / kScale);
  std::uint64_t frac = magnitude % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

double cost_ratio(Cost numerator, Cost denominator) {
  if (denominator == Cost::zero()) {
    return numerator == Cost::zero() ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(numerator.micros()) / static_cast<double>(denominator.micros());
}

}  // namespace agobf
