#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace adaptgap {

/// Exponent in [1, inf]. Finite values are stored as-is; INF is a separate
/// flag so norm code can branch exactly instead of approximating a limit.
class Extended {
 public:
  /// Throws InvalidExponent unless value >= 1 and finite.
  explicit Extended(double value);

  static Extended inf() { return Extended(); }

  /// Accepts a decimal literal or "inf"/"INF"/"infinity".
  static Extended parse(std::string_view text);

  bool is_inf() const { return inf_; }
  /// Finite value; must not be called on INF.
  double value() const;
  /// 1/value, or 0 for INF.
  double reciprocal() const { return inf_ ? 0.0 : 1.0 / value_; }
  /// min(value, 2), the exponent that governs Monte Carlo rates.
  Extended capped_at_two() const;

  std::string to_string() const;

  friend bool operator==(const Extended& a, const Extended& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
  }
  friend bool operator<(const Extended& a, const Extended& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const Extended& a, const Extended& b) { return !(b < a); }
  friend bool operator>(const Extended& a, const Extended& b) { return b < a; }
  friend bool operator>=(const Extended& a, const Extended& b) { return !(a < b); }

 private:
  Extended() : value_(0.0), inf_(true) {}

  double value_;
  bool inf_;
};

/// Dimensions and exponents of L_p^{n1}(L_u^{n2}).
struct ProblemSpec {
  std::size_t n1;
  std::size_t n2;
  Extended p;
  Extended u;

  ProblemSpec(std::size_t n1, std::size_t n2, Extended p, Extended u);

  std::size_t entries() const { return n1 * n2; }
};

}  // namespace adaptgap
