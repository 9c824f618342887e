#include "ibprf/analysis/formulas.hpp"

#include <cmath>
#include <string>

#include "ibprf/errors.hpp"

namespace ibprf {

namespace {

std::string point(std::initializer_list<std::pair<const char*, std::uint64_t>> args) {
  std::string s = "(";
  for (const auto& [k, v] : args) {
    if (s.size() > 1) s += ", ";
    s += std::string(k) + "=" + std::to_string(v);
  }
  return s + ")";
}

// 1 - C(a-b,b)/C(a,b) by both printed routes; shared by the EG and poly-pool forms.
ExactProbability miss_both_forms(std::uint64_t a, std::uint64_t b, const char* name) {
  if (2 * b > a) return ExactProbability(Rational(1));
  const Rational binomial_form = Rational(1) - Rational(binomial(a - b, b), binomial(a, b));
  Rational product = 1;
  for (std::uint64_t i = 0; i < b; ++i) product *= Rational(BigInt(a - b - i), BigInt(a - i));
  const Rational product_form = Rational(1) - product;
  if (binomial_form != product_form) {
    throw FormulaIntegrityError(std::string(name) + ": binomial and product forms disagree at " +
                                point({{"a", a}, {"b", b}}));
  }
  return ExactProbability(binomial_form);
}

}  // namespace

ExactProbability p_direct_ibprf(std::uint64_t n, std::uint64_t m) {
  if (m == 0 || m >= n) throw DomainError("p_direct_ibprf needs 0 < m < n at " + point({{"n", n}, {"m", m}}));
  const Rational binomial_form = Rational(1) - Rational(binomial(n - 1, m), binomial(n, m));
  const Rational simplified{BigInt(m), BigInt(n)};
  if (binomial_form != simplified) {
    throw FormulaIntegrityError("p_direct_ibprf: forms disagree at " + point({{"n", n}, {"m", m}}));
  }
  return ExactProbability(simplified);
}

ExactProbability p_direct_bidirectional(std::uint64_t n, std::uint64_t m) {
  if (m == 0 || m >= n) {
    throw DomainError("p_direct_bidirectional needs 0 < m < n at " + point({{"n", n}, {"m", m}}));
  }
  const Rational miss = Rational(1) - Rational(BigInt(m), BigInt(n - 1));
  return ExactProbability(Rational(1) - miss * miss);
}

double p_onehop(double p, std::uint64_t d) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("p_onehop needs 0 <= p <= 1 (p=" + std::to_string(p) +
                      ", d=" + std::to_string(d) + ")");
  }
  const double dd = static_cast<double>(d);
  const double ps = 1.0 - (1.0 - p) * std::pow(1.0 - p * p, dd);
  const double prev = d == 0 ? p : 1.0 - (1.0 - p) * std::pow(1.0 - p * p, dd - 1.0);
  if (!(ps >= 0.0 && ps <= 1.0) || ps < prev || ps < p) {
    throw FormulaIntegrityError("p_onehop not monotone at p=" + std::to_string(p) +
                                ", d=" + std::to_string(d));
  }
  return ps;
}

ExactProbability p_cell(std::uint64_t n_i, std::uint64_t m) {
  if (m == 0 || m >= n_i) throw DomainError("p_cell needs 0 < m < n_i at " + point({{"n_i", n_i}, {"m", m}}));
  return p_direct_ibprf(n_i, m);
}

ExactProbability p_avg_cells(std::span<const ExactProbability> per_cell) {
  if (per_cell.empty()) throw DomainError("p_avg_cells needs at least one cell");
  Rational sum = 0;
  for (const auto& p : per_cell) sum += p.value();
  return ExactProbability(sum / Rational(BigInt(per_cell.size())));
}

ExactProbability p_eg(std::uint64_t pool, std::uint64_t ring) {
  if (ring > pool) throw DomainError("p_eg needs m <= M at " + point({{"M", pool}, {"m", ring}}));
  return miss_both_forms(pool, ring, "p_eg");
}

ExactProbability p_qcomposite_term(std::uint64_t pool, std::uint64_t ring, std::uint64_t i) {
  if (ring > pool || i > ring) {
    throw DomainError("p_qcomposite_term needs i <= m <= M at " +
                      point({{"M", pool}, {"m", ring}, {"i", i}}));
  }
  const std::uint64_t rest = ring - i;
  const BigInt num = binomial(pool, i) * binomial(pool - i, 2 * rest) * binomial(2 * rest, rest);
  const BigInt den = binomial(pool, ring) * binomial(pool, ring);
  return ExactProbability::ratio(num, den);
}

ExactProbability p_qcomposite(std::uint64_t pool, std::uint64_t ring, std::uint64_t q) {
  if (q == 0 || q > ring || ring > pool) {
    throw DomainError("p_qcomposite needs 1 <= q <= m <= M at " +
                      point({{"M", pool}, {"m", ring}, {"q", q}}));
  }
  Rational total = 0;
  Rational below_q = 0;
  for (std::uint64_t i = 0; i <= ring; ++i) {
    const Rational term = p_qcomposite_term(pool, ring, i).value();
    total += term;
    if (i < q) below_q += term;
  }
  if (total != 1) {
    throw FormulaIntegrityError("p_qcomposite: p_i sum to " + total.str() + " at " +
                                point({{"M", pool}, {"m", ring}}));
  }
  return ExactProbability(Rational(1) - below_q);
}

ExactProbability p_polypool(std::uint64_t s, std::uint64_t sprime) {
  if (sprime > s) throw DomainError("p_polypool needs s' <= s at " + point({{"s", s}, {"sprime", sprime}}));
  return miss_both_forms(s, sprime, "p_polypool");
}

std::uint64_t polypool_max_n(std::uint64_t t, std::uint64_t s, std::uint64_t sprime) {
  if (t == 0 || sprime == 0 || sprime > s) {
    throw DomainError("polypool_max_n needs t >= 1 and 0 < s' <= s at " +
                      point({{"t", t}, {"s", s}, {"sprime", sprime}}));
  }
  return (t + 1) * s / sprime;
}

}  // namespace ibprf
