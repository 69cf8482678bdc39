#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace agobf {

/// Attack cost in fixed-point micro-units.
///
/// Config costs are normalized exploitability subscores in [0,1]; plan and
/// APTC totals are sums of those. Keeping them as integers makes cost
/// comparisons, plateau detection and oracle equality exact.
class Cost {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Cost() = default;

  static constexpr Cost from_micros(std::int64_t micros) { return Cost(micros); }
  static Cost from_double(double value);
  static constexpr Cost zero() { return Cost(0); }
  static constexpr Cost infinity() { return Cost(std::numeric_limits<std::int64_t>::max()); }

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const { return static_cast<double>(micros_) / kScale; }
  constexpr bool is_infinite() const { return micros_ == infinity().micros_; }

  /// Shortest decimal rendering, e.g. "0.86", "22", "0.717949".
  std::string to_string() const;

  constexpr Cost& operator+=(Cost other) {
    micros_ += other.micros_;
    return *this;
  }
  constexpr Cost& operator-=(Cost other) {
    micros_ -= other.micros_;
    return *this;
  }
  friend constexpr Cost operator+(Cost a, Cost b) { return a += b; }
  friend constexpr Cost operator-(Cost a, Cost b) { return a -= b; }
  friend constexpr Cost operator*(std::int64_t k, Cost c) { return Cost(k * c.micros_); }

  friend constexpr auto operator<=>(Cost, Cost) = default;

 private:
  constexpr explicit Cost(std::int64_t micros) : micros_(micros) {}

  std::int64_t micros_ = 0;
};

/// Ratio of two costs as a double; 1.0 when both are zero.
double cost_ratio(Cost numerator, Cost denominator);

}  // namespace agobf
