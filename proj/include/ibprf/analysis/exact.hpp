#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ibprf {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// C(n, k); zero when k > n.
BigInt binomial(std::uint64_t n, std::uint64_t k);

/// A probability held as a reduced fraction.
class ExactProbability {
 public:
  ExactProbability() = default;
  /// Throws DomainError outside [0, 1].
  explicit ExactProbability(Rational value);
  static ExactProbability ratio(const BigInt& num, const BigInt& den);

  const Rational& value() const { return value_; }
  BigInt numerator() const;
  BigInt denominator() const;

  /// "a/b" in lowest terms (denominator always printed).
  std::string fraction() const;
  /// 10 significant digits, round half to even, at least one fractional digit.
  std::string decimal() const;
  double to_double() const;

  friend bool operator==(const ExactProbability&, const ExactProbability&) = default;
  friend bool operator<(const ExactProbability& a, const ExactProbability& b) {
    return a.value_ < b.value_;
  }

 private:
  Rational value_{0};
};

/// Decimal view of any non-negative rational (same rounding as ExactProbability).
std::string decimal_view(const Rational& value, int significant = 10);

}  // namespace ibprf
