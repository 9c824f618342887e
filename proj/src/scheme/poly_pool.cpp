#include "ibprf/scheme/poly_pool.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ibprf/crypto/prf.hpp"
#include "ibprf/errors.hpp"
#include "ibprf/scheme/baselines.hpp"

namespace ibprf {

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t d = 2; d * d <= x; ++d) {
    if (x % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t prime) : p_(prime) {
  if (prime >= (1ULL << 32) || !is_prime(prime)) {
    throw ConfigError("field modulus " + std::to_string(prime) + " is not a prime below 2^32");
  }
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t exp) const {
  std::uint64_t result = 1 % p_;
  base %= p_;
  while (exp > 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

std::uint64_t PrimeField::inverse(std::uint64_t a) const {
  if (reduce(a) == 0) throw std::domain_error("zero has no inverse");
  return pow(a, p_ - 2);
}

SymmetricBivariatePoly::SymmetricBivariatePoly(std::uint32_t degree, const PrimeField& field,
                                               std::vector<std::uint64_t> coefficients)
    : degree_(degree), field_(field), coeffs_(std::move(coefficients)) {
  const std::size_t side = degree_ + 1;
  if (coeffs_.size() != side * side) throw ConfigError("coefficient matrix has the wrong size");
  for (std::uint64_t c : coeffs_) {
    if (c >= field_.prime()) throw ConfigError("coefficient not reduced modulo P");
  }
  if (!is_symmetric()) throw ConfigError("bivariate polynomial is not symmetric");
}

SymmetricBivariatePoly SymmetricBivariatePoly::random(std::uint32_t degree,
                                                      const PrimeField& field, Rng& rng) {
  const std::size_t side = degree + 1;
  std::vector<std::uint64_t> c(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = i; j < side; ++j) {
      c[i * side + j] = c[j * side + i] = uniform_below(rng, field.prime());
    }
  }
  return SymmetricBivariatePoly(degree, field, std::move(c));
}

bool SymmetricBivariatePoly::is_symmetric() const {
  for (std::uint32_t i = 0; i <= degree_; ++i) {
    for (std::uint32_t j = i + 1; j <= degree_; ++j) {
      if (coefficient(i, j) != coefficient(j, i)) return false;
    }
  }
  return true;
}

std::vector<std::uint64_t> SymmetricBivariatePoly::share_at(std::uint64_t x) const {
  // b_j = sum_i a_ij x^i
  std::vector<std::uint64_t> b(degree_ + 1, 0);
  std::uint64_t xi = 1;
  const std::uint64_t xr = field_.reduce(x);
  for (std::uint32_t i = 0; i <= degree_; ++i) {
    for (std::uint32_t j = 0; j <= degree_; ++j) {
      b[j] = field_.add(b[j], field_.mul(coefficient(i, j), xi));
    }
    xi = field_.mul(xi, xr);
  }
  return b;
}

std::uint64_t SymmetricBivariatePoly::evaluate(std::uint64_t x, std::uint64_t y) const {
  PolyShare share{0, NodeId{x}, share_at(x)};
  return share.evaluate(y, field_);
}

std::uint64_t PolyShare::evaluate(std::uint64_t y, const PrimeField& field) const {
  std::uint64_t acc = 0;
  const std::uint64_t yr = field.reduce(y);
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = field.add(field.mul(acc, yr), *it);
  }
  return acc;
}

std::vector<std::uint32_t> NodeShares::poly_ids() const {
  std::vector<std::uint32_t> out;
  out.reserve(shares.size());
  for (const PolyShare& s : shares) out.push_back(s.poly_id);
  return out;
}

const PolyShare* NodeShares::find(std::uint32_t poly_id) const {
  auto it = std::lower_bound(shares.begin(), shares.end(), poly_id,
                             [](const PolyShare& s, std::uint32_t id) { return s.poly_id < id; });
  return it != shares.end() && it->poly_id == poly_id ? &*it : nullptr;
}

std::size_t NodeShares::stored_elements() const {
  std::size_t n = 0;
  for (const PolyShare& s : shares) n += s.coefficients.size();
  return n;
}

PolyPool::PolyPool(std::size_t pool_size, std::uint32_t degree, std::uint64_t prime, Rng& rng)
    : degree_(degree), field_(prime) {
  if (pool_size == 0) throw ConfigError("polynomial pool size s must be positive");
  if (degree == 0) throw ConfigError("polynomial degree t must be at least 1");
  polys_.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    polys_.push_back(SymmetricBivariatePoly::random(degree, field_, rng));
  }
}

NodeShares PolyPool::assign(NodeId node, std::size_t shares_per_node, Rng& rng) const {
  if (shares_per_node > polys_.size()) {
    throw ConfigError("shares per node s' = " + std::to_string(shares_per_node) +
                      " exceeds pool size s = " + std::to_string(polys_.size()));
  }
  if (node.value >= field_.prime()) {
    throw ConfigError("node id " + std::to_string(node.value) + " is not below P = " +
                      std::to_string(field_.prime()));
  }
  NodeShares out{node, {}};
  out.shares.reserve(shares_per_node);
  for (std::uint64_t id : sample_without_replacement(rng, polys_.size(), shares_per_node)) {
    const auto pid = static_cast<std::uint32_t>(id);
    out.shares.push_back(PolyShare{pid, node, polys_[pid].share_at(node.value)});
  }
  return out;
}

std::optional<std::uint32_t> common_poly(const NodeShares& u, const NodeShares& v) {
  auto iu = u.shares.begin();
  auto iv = v.shares.begin();
  while (iu != u.shares.end() && iv != v.shares.end()) {
    if (iu->poly_id < iv->poly_id) {
      ++iu;
    } else if (iv->poly_id < iu->poly_id) {
      ++iv;
    } else {
      return iu->poly_id;
    }
  }
  return std::nullopt;
}

PairwiseKey poly_link_key(std::uint64_t element) {
  return Prf(polypool_domain_master()).derive(NodeId{element});
}

std::optional<PairwiseKey> poly_establish(const NodeShares& u, const NodeShares& v,
                                          const PrimeField& field) {
  const auto pid = common_poly(u, v);
  if (!pid) return std::nullopt;
  const std::uint64_t at_u = u.find(*pid)->evaluate(v.owner.value, field);
  const std::uint64_t at_v = v.find(*pid)->evaluate(u.owner.value, field);
  if (at_u != at_v) throw IntegrityError("polynomial shares disagree: f(u,v) != f(v,u)");
  return poly_link_key(at_u);
}

namespace {

// Coefficients (ascending powers) of the Lagrange basis polynomial for point k.
std::vector<std::uint64_t> lagrange_basis(std::span<const std::uint64_t> xs, std::size_t k,
                                          const PrimeField& f) {
  std::vector<std::uint64_t> poly{1};
  std::uint64_t denom = 1;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (j == k) continue;
    // poly *= (x - xs[j])
    std::vector<std::uint64_t> next(poly.size() + 1, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] = f.add(next[i + 1], poly[i]);
      next[i] = f.sub(next[i], f.mul(poly[i], xs[j]));
    }
    poly = std::move(next);
    denom = f.mul(denom, f.sub(xs[k], xs[j]));
  }
  const std::uint64_t inv = f.inverse(denom);
  for (auto& c : poly) c = f.mul(c, inv);
  return poly;
}

}  // namespace

std::optional<SymmetricBivariatePoly> recover_polynomial(std::span<const PolyShare> shares,
                                                         std::uint32_t degree,
                                                         const PrimeField& field) {
  const std::size_t side = degree + 1;
  std::vector<const PolyShare*> used;
  std::vector<std::uint64_t> xs;
  for (const PolyShare& s : shares) {
    if (used.size() == side) break;
    const std::uint64_t x = field.reduce(s.node.value);
    if (std::find(xs.begin(), xs.end(), x) != xs.end()) continue;
    if (s.coefficients.size() != side) return std::nullopt;
    used.push_back(&s);
    xs.push_back(x);
  }
  if (used.size() < side) return std::nullopt;

  // f(x, y) = sum_k L_k(x) g_k(y), so a_ij = sum_k [x^i]L_k * [y^j]g_k.
  std::vector<std::uint64_t> coeffs(side * side, 0);
  for (std::size_t k = 0; k < side; ++k) {
    const auto basis = lagrange_basis(xs, k, field);
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        coeffs[i * side + j] =
            field.add(coeffs[i * side + j], field.mul(basis[i], used[k]->coefficients[j]));
      }
    }
  }
  try {
    return SymmetricBivariatePoly(degree, field, std::move(coeffs));
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

}  // namespace ibprf
