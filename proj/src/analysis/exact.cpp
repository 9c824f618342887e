#include "ibprf/analysis/exact.hpp"

#include <cmath>

#include "ibprf/errors.hpp"

namespace ibprf {

namespace mp = boost::multiprecision;

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

ExactProbability::ExactProbability(Rational value) : value_(std::move(value)) {
  if (value_ < 0 || value_ > 1) {
    throw DomainError("probability " + value_.str() + " outside [0, 1]");
  }
}

ExactProbability ExactProbability::ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("zero denominator");
  return ExactProbability(Rational(num, den));
}

BigInt ExactProbability::numerator() const { return mp::numerator(value_); }
BigInt ExactProbability::denominator() const { return mp::denominator(value_); }

std::string ExactProbability::fraction() const {
  return numerator().str() + "/" + denominator().str();
}

std::string ExactProbability::decimal() const { return decimal_view(value_); }

double ExactProbability::to_double() const { return value_.convert_to<double>(); }

std::string decimal_view(const Rational& value, int significant) {
  if (value < 0) throw DomainError("decimal_view of a negative value");
  if (value == 0) return "0.0";

  // Find e with 10^e <= value < 10^(e+1).
  auto pow10 = [](int e) {
    Rational r = 1;
    for (int i = 0; i < std::abs(e); ++i) r *= 10;
    return e >= 0 ? r : Rational(1) / r;
  };
  int e = static_cast<int>(std::floor(std::log10(value.convert_to<double>())));
  while (pow10(e) > value) --e;
  while (pow10(e + 1) <= value) ++e;

  // Round value * 10^(significant-1-e) half to even.
  int shift = significant - 1 - e;
  Rational scaled = value * pow10(shift);
  BigInt q = mp::numerator(scaled) / mp::denominator(scaled);
  const Rational rem = scaled - Rational(q);
  if (rem > Rational(1, 2) || (rem == Rational(1, 2) && (q & 1) != 0)) ++q;

  std::string digits = q.str();
  std::string out;
  if (shift <= 0) {
    out = digits + std::string(static_cast<std::size_t>(-shift), '0') + ".0";
  } else {
    const auto frac = static_cast<std::size_t>(shift);
    if (digits.size() <= frac) digits.insert(0, frac - digits.size() + 1, '0');
    out = digits.substr(0, digits.size() - frac) + "." + digits.substr(digits.size() - frac);
    while (out.back() == '0' && out[out.size() - 2] != '.') out.pop_back();
  }
  return out;
}

}  // namespace ibprf
