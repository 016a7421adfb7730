#include "adaptgap/extended.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "adaptgap/error.hpp"

namespace adaptgap {

Extended::Extended(double value) : value_(value), inf_(false) {
  if (!std::isfinite(value) || value < 1.0) {
    std::ostringstream msg;
    msg << "exponent must be a finite real >= 1 or inf, got " << value;
    throw InvalidExponent(msg.str());
  }
}

Extended Extended::parse(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity") return inf();
  double value = 0.0;
  const char* first = lower.data();
  const char* last = first + lower.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidExponent("cannot parse exponent '" + std::string(text) + "'");
  }
  return Extended(value);
}

double Extended::value() const {
  if (inf_) throw InvalidExponent("value() called on INF exponent");
  return value_;
}

Extended Extended::capped_at_two() const {
  if (inf_ || value_ > 2.0) return Extended(2.0);
  return *this;
}

std::string Extended::to_string() const {
  if (inf_) return "inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value_);
  (void)ec;
  return std::string(buf, end);
}

ProblemSpec::ProblemSpec(std::size_t n1_, std::size_t n2_, Extended p_, Extended u_)
    : n1(n1_), n2(n2_), p(p_), u(u_) {
  if (n1 == 0 || n2 == 0) throw InvalidParameters("ProblemSpec requires n1 >= 1 and n2 >= 1");
}

}  // namespace adaptgap
